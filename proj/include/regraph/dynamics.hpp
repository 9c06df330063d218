#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "regraph/graph.hpp"
#include "regraph/payoff.hpp"

namespace regraph {

/// Time derivative of every x_{v,s}, row-major N x M.
struct Derivative {
  std::size_t m = 0;
  std::vector<double> values;

  std::span<const double> at(std::size_t v) const { return {values.data() + v * m, m}; }
  double max_abs() const;
};

/// x_{v,s} (p_{v,s} - phi_v) for every vertex and strategy.
Derivative replicator_rhs(const Graph& g, const GameSpec& spec, StateView x);

/// One session of the discrete-time replicator map with period tau:
/// x'_{v,s} = x_{v,s} (1 + p_{v,s} tau) / (1 + phi_v tau).
/// Throws IntegrationError when some 1 + phi_v tau <= 0.
StateProfile discrete_step(const Graph& g, const GameSpec& spec, const StateProfile& x,
                           double tau);

/// Single-population replicator field y_s (e_s^T B y - y^T B y).
std::vector<double> classical_rhs(const PayoffMatrix& b, std::span<const double> y);

struct IntegratorOptions {
  double dt = 1e-3;
  double t_end = 50.0;
  std::size_t renormalize_every = 100;
  bool clamp_negatives = true;
  std::size_t sample_every = 100;

  void validate() const;

  friend bool operator==(const IntegratorOptions&, const IntegratorOptions&) = default;
};

/// Components below this abort the run as numerically unstable.
inline constexpr double kInstabilityThreshold = -1e-9;

struct SampleDiagnostics {
  /// Worst max_v |sum_s x_{v,s} - 1| seen on raw steps since the previous
  /// sample, before any renormalization.
  double simplex_residual = 0.0;
  /// Smallest raw component seen since the previous sample.
  double min_component = 0.0;
  /// max_{v,s} |dx_{v,s}/dt| at the sample.
  double max_derivative = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateProfile> states;
  std::vector<SampleDiagnostics> diagnostics;

  // Over every step of the run.
  double worst_residual = 0.0;
  double min_component = 0.0;

  const StateProfile& final_state() const { return states.back(); }
};

/// Fixed-step classical RK4 on the replicator equation on graphs.
///
/// Every renormalize_every steps each vertex row is clamped (when enabled)
/// and rescaled to sum 1. A component below kInstabilityThreshold throws
/// IntegrationError. Samples are taken at t = 0, every sample_every steps,
/// and at t_end.
Trajectory integrate(const Graph& g, const GameSpec& spec, const StateProfile& x0,
                     const IntegratorOptions& opts);

/// Same scheme applied to the single-population replicator equation; the
/// returned trajectory has one "vertex".
Trajectory integrate_classical(const PayoffMatrix& b, std::span<const double> y0,
                               const IntegratorOptions& opts);

inline constexpr double kDefaultSteadyEps = 1e-6;
inline constexpr double kDefaultSteadyWindow = 5.0;

/// Earliest sample time t* with max |dx/dt| < eps at every sample in
/// [t*, t* + window]. The window must fit inside the trajectory.
std::optional<double> detect_steady_state(const Trajectory& traj, const Graph& g,
                                          const GameSpec& spec,
                                          double eps = kDefaultSteadyEps,
                                          double window = kDefaultSteadyWindow);

/// Long-format CSV `t,vertex,strategy,x`, 1-indexed, 12 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// `t,mean_x1,...,mean_xM`: unweighted network average per sample.
void write_average_csv(std::ostream& os, const Trajectory& traj);

}  // namespace regraph
