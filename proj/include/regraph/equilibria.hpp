#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "regraph/graph.hpp"
#include "regraph/payoff.hpp"

namespace regraph {

inline constexpr double kNashTolerance = 1e-12;

struct NashProfile {
  PureProfile strategies;
  /// Largest payoff gain any vertex gets from a unilateral pure deviation
  /// (<= kNashTolerance for a listed profile).
  double worst_deviation_gain = 0.0;
  /// Every deviation strictly loses.
  bool strict = false;
};

struct EquilibriumReport {
  std::vector<NashProfile> pure_nash;  // lexicographic order
  std::size_t checked_profiles = 0;
};

/// Brute-force pure Nash equilibria of the induced N-player game.
/// Throws ValidationError when M^N exceeds cap.
EquilibriumReport enumerate_pure_nash(const Graph& g, const GameSpec& spec,
                                      std::size_t cap = kDefaultEnumerationCap);

struct MixedNash2x2 {
  std::optional<std::vector<double>> point;  // interior indifference point
  bool degenerate = false;                    // |denominator| < 1e-12
};

/// Interior point where both pure strategies of a 2x2 game earn the same
/// payoff, when it lies strictly inside (0, 1).
MixedNash2x2 mixed_nash_2x2(const PayoffMatrix& b);

struct RestPointCheck {
  bool rest = false;
  double residual = 0.0;  // max |dx/dt|
};

RestPointCheck is_rest_point(const Graph& g, const GameSpec& spec, StateView x, double tol);

/// max_s (p_{v,s} - phi_v). Non-positive at every vertex iff the profile
/// is a Nash equilibrium.
double best_response_violation(const Graph& g, const GameSpec& spec, StateView x,
                               std::size_t v);

/// CSV `s_1,...,s_N,strict`, strategies 1-indexed.
void write_equilibria_csv(std::ostream& os, std::size_t n, const EquilibriumReport& report);

/// CSV `s_1,...,s_N,pi_1,...,pi_N`, strategies 1-indexed.
void write_tensor_csv(std::ostream& os, const PayoffTensor& tensor);

}  // namespace regraph
