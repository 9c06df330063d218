#include "regraph/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "regraph/error.hpp"
#include "regraph/format.hpp"

namespace regraph {

double Derivative::max_abs() const {
  double worst = 0.0;
  for (double d : values) worst = std::max(worst, std::abs(d));
  return worst;
}

Derivative replicator_rhs(const Graph& g, const GameSpec& spec, StateView x) {
  const std::size_t n = g.size();
  const std::size_t m = spec.strategies();
  Derivative dx{m, std::vector<double>(n * m, 0.0)};
  std::vector<double> p(m);
  for (std::size_t v = 0; v < n; ++v) {
    strategy_fitnesses(g, spec, x, v, p);
    const auto xv = x.at(v);
    double phi = 0.0;
    for (std::size_t s = 0; s < m; ++s) phi += xv[s] * p[s];
    for (std::size_t s = 0; s < m; ++s) dx.values[v * m + s] = xv[s] * (p[s] - phi);
  }
  return dx;
}

StateProfile discrete_step(const Graph& g, const GameSpec& spec, const StateProfile& x,
                           double tau) {
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  const std::size_t n = g.size();
  const std::size_t m = spec.strategies();
  std::vector<double> next(n * m);
  std::vector<double> p(m);
  for (std::size_t v = 0; v < n; ++v) {
    strategy_fitnesses(g, spec, x, v, p);
    double phi = 0.0;
    for (std::size_t s = 0; s < m; ++s) phi += x(v, s) * p[s];
    const double denom = 1.0 + phi * tau;
    if (!(denom > 0.0)) {
      std::ostringstream os;
      os << "discrete step: 1 + phi*tau = " << denom << " at vertex " << v + 1
         << "; reduce tau (" << tau << ")";
      throw IntegrationError(os.str());
    }
    for (std::size_t s = 0; s < m; ++s) {
      next[v * m + s] = x(v, s) * (1.0 + p[s] * tau) / denom;
      if (next[v * m + s] < 0.0) {
        std::ostringstream os;
        os << "discrete step: negative share at vertex " << v + 1 << ", strategy " << s + 1
           << "; reduce tau (" << tau << ")";
        throw IntegrationError(os.str());
      }
    }
  }
  return StateProfile::from_flat(m, std::move(next));
}

std::vector<double> classical_rhs(const PayoffMatrix& b, std::span<const double> y) {
  const std::size_t m = b.size();
  if (y.size() != m) throw ValidationError("state size does not match payoff matrix");
  std::vector<double> fitness(m, 0.0);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t r = 0; r < m; ++r) fitness[s] += b(s, r) * y[r];
  double mean = 0.0;
  for (std::size_t s = 0; s < m; ++s) mean += y[s] * fitness[s];
  std::vector<double> dy(m);
  for (std::size_t s = 0; s < m; ++s) dy[s] = y[s] * (fitness[s] - mean);
  return dy;
}

void IntegratorOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ValidationError("t_end must be positive");
  if (dt > t_end) throw ValidationError("dt must not exceed t_end");
  if (renormalize_every == 0) throw ValidationError("renormalize_every must be positive");
  if (sample_every == 0) throw ValidationError("sample_every must be positive");
}

namespace {

struct RowStats {
  double residual = 0.0;
  double min_component = std::numeric_limits<double>::infinity();
};

RowStats row_stats(std::span<const double> x, std::size_t m) {
  RowStats st;
  for (std::size_t start = 0; start < x.size(); start += m) {
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const double value = x[start + s];
      if (!std::isfinite(value)) {
        st.min_component = -std::numeric_limits<double>::infinity();
        st.residual = std::numeric_limits<double>::infinity();
        return st;
      }
      sum += value;
      st.min_component = std::min(st.min_component, value);
    }
    st.residual = std::max(st.residual, std::abs(sum - 1.0));
  }
  return st;
}

void renormalize(std::span<double> x, std::size_t m, bool clamp) {
  for (std::size_t start = 0; start < x.size(); start += m) {
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      double& value = x[start + s];
      if (clamp && value < 0.0) value = 0.0;
      sum += value;
    }
    for (std::size_t s = 0; s < m; ++s) x[start + s] /= sum;
  }
}

// Sampled states must be valid profiles even between renormalizations.
StateProfile snapshot(std::span<const double> x, std::size_t m) {
  std::vector<double> copy(x.begin(), x.end());
  renormalize(copy, m, true);
  return StateProfile::from_flat(m, std::move(copy));
}

template <class Field>
Trajectory run_rk4(Field&& field, std::size_t m, std::vector<double> x,
                   const IntegratorOptions& opts) {
  opts.validate();
  const std::size_t len = x.size();
  std::vector<double> k1(len), k2(len), k3(len), k4(len), stage(len);

  auto derivative_norm = [&](std::span<const double> at) {
    field(at, std::span<double>(k1));
    double worst = 0.0;
    for (double d : k1) worst = std::max(worst, std::abs(d));
    return worst;
  };

  Trajectory traj;
  const RowStats initial = row_stats(x, m);
  traj.worst_residual = initial.residual;
  traj.min_component = initial.min_component;
  traj.times.push_back(0.0);
  traj.states.push_back(snapshot(x, m));
  traj.diagnostics.push_back({initial.residual, initial.min_component, derivative_norm(x)});

  const auto steps = static_cast<std::size_t>(std::ceil(opts.t_end / opts.dt - 1e-9));
  SampleDiagnostics pending{0.0, std::numeric_limits<double>::infinity(), 0.0};

  for (std::size_t k = 1; k <= steps; ++k) {
    const bool last = k == steps;
    const double h = last ? opts.t_end - static_cast<double>(steps - 1) * opts.dt : opts.dt;

    field(x, k1);
    for (std::size_t i = 0; i < len; ++i) stage[i] = x[i] + 0.5 * h * k1[i];
    field(stage, k2);
    for (std::size_t i = 0; i < len; ++i) stage[i] = x[i] + 0.5 * h * k2[i];
    field(stage, k3);
    for (std::size_t i = 0; i < len; ++i) stage[i] = x[i] + h * k3[i];
    field(stage, k4);
    for (std::size_t i = 0; i < len; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double t = last ? opts.t_end : static_cast<double>(k) * opts.dt;
    const RowStats st = row_stats(x, m);
    if (!(st.min_component >= kInstabilityThreshold)) {
      std::ostringstream os;
      os << "integration unstable at t=" << t << ": component " << st.min_component
         << " below " << kInstabilityThreshold << "; reduce dt (" << opts.dt << ")";
      throw IntegrationError(os.str());
    }
    traj.worst_residual = std::max(traj.worst_residual, st.residual);
    traj.min_component = std::min(traj.min_component, st.min_component);
    pending.simplex_residual = std::max(pending.simplex_residual, st.residual);
    pending.min_component = std::min(pending.min_component, st.min_component);

    if (k % opts.renormalize_every == 0 || last) renormalize(x, m, opts.clamp_negatives);

    if (k % opts.sample_every == 0 || last) {
      traj.times.push_back(t);
      traj.states.push_back(snapshot(x, m));
      pending.max_derivative = derivative_norm(x);
      traj.diagnostics.push_back(pending);
      pending = SampleDiagnostics{0.0, std::numeric_limits<double>::infinity(), 0.0};
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate(const Graph& g, const GameSpec& spec, const StateProfile& x0,
                     const IntegratorOptions& opts) {
  spec.validate(g.size());
  if (x0.vertices() != g.size() || x0.strategies() != spec.strategies()) {
    throw ValidationError("initial state dimensions do not match graph and game");
  }
  const std::size_t m = spec.strategies();
  std::vector<double> p(m);
  auto field = [&](std::span<const double> x, std::span<double> out) {
    const StateView view{x, m};
    for (std::size_t v = 0; v < g.size(); ++v) {
      strategy_fitnesses(g, spec, view, v, p);
      double phi = 0.0;
      for (std::size_t s = 0; s < m; ++s) phi += x[v * m + s] * p[s];
      for (std::size_t s = 0; s < m; ++s) out[v * m + s] = x[v * m + s] * (p[s] - phi);
    }
  };
  return run_rk4(field, m, std::vector<double>(x0.flat().begin(), x0.flat().end()), opts);
}

Trajectory integrate_classical(const PayoffMatrix& b, std::span<const double> y0,
                               const IntegratorOptions& opts) {
  const StateProfile start = StateProfile::from_flat(b.size(), {y0.begin(), y0.end()});
  if (start.vertices() != 1) throw ValidationError("classical state must be a single vector");
  auto field = [&](std::span<const double> y, std::span<double> out) {
    const auto dy = classical_rhs(b, y);
    std::copy(dy.begin(), dy.end(), out.begin());
  };
  return run_rk4(field, b.size(), std::vector<double>(start.flat().begin(), start.flat().end()),
                 opts);
}

std::optional<double> detect_steady_state(const Trajectory& traj, const Graph& g,
                                          const GameSpec& spec, double eps, double window) {
  if (traj.times.empty()) return std::nullopt;
  const double span = traj.times.back() - traj.times.front();
  if (!(window >= 0.0) || window > span) {
    throw ValidationError("steady-state window exceeds trajectory span");
  }
  std::vector<bool> calm(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    calm[i] = replicator_rhs(g, spec, traj.states[i]).max_abs() < eps;
  }
  // Slack absorbs the rounding in sample times k * dt.
  const double slack = 1e-9 * std::max(1.0, span);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double start = traj.times[i];
    if (start + window > traj.times.back() + slack) break;
    bool ok = true;
    for (std::size_t j = i; j < traj.times.size() && traj.times[j] <= start + window + slack; ++j) {
      if (!calm[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return start;
  }
  return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,vertex,strategy,x\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const StateProfile& x = traj.states[i];
    const std::string t = format_real(traj.times[i]);
    for (std::size_t v = 0; v < x.vertices(); ++v)
      for (std::size_t s = 0; s < x.strategies(); ++s)
        os << t << ',' << v + 1 << ',' << s + 1 << ',' << format_real(x(v, s)) << '\n';
  }
}

void write_average_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t m = traj.states.empty() ? 0 : traj.states.front().strategies();
  os << 't';
  for (std::size_t s = 0; s < m; ++s) os << ",mean_x" << s + 1;
  os << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const StateProfile& x = traj.states[i];
    os << format_real(traj.times[i]);
    for (std::size_t s = 0; s < m; ++s) {
      double sum = 0.0;
      for (std::size_t v = 0; v < x.vertices(); ++v) sum += x(v, s);
      os << ',' << format_real(sum / static_cast<double>(x.vertices()));
    }
    os << '\n';
  }
}

}  // namespace regraph
