#include "regraph/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "regraph/dynamics.hpp"
#include "regraph/error.hpp"
#include "regraph/format.hpp"

namespace regraph {

EquilibriumReport enumerate_pure_nash(const Graph& g, const GameSpec& spec, std::size_t cap) {
  spec.validate(g.size());
  const std::size_t n = g.size();
  const std::size_t m = spec.strategies();
  const auto count = profile_count(n, m, cap);
  if (!count) {
    throw ValidationError("equilibrium search needs " + std::to_string(m) + "^" +
                          std::to_string(n) + " profiles, above the enumeration cap of " +
                          std::to_string(cap));
  }

  EquilibriumReport report;
  report.checked_profiles = *count;
  PureProfile profile(n, 0);
  do {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n && worst <= kNashTolerance; ++v) {
      const double current = pure_payoff(g, spec, profile, v);
      PureProfile deviated = profile;
      for (std::size_t s = 0; s < m; ++s) {
        if (s == profile[v]) continue;
        deviated[v] = s;
        worst = std::max(worst, pure_payoff(g, spec, deviated, v) - current);
      }
    }
    if (worst <= kNashTolerance) {
      report.pure_nash.push_back({profile, worst, worst < -kNashTolerance});
    }
  } while (next_profile(profile, m));
  return report;
}

MixedNash2x2 mixed_nash_2x2(const PayoffMatrix& b) {
  if (b.size() != 2) throw ValidationError("mixed_nash_2x2 needs a 2x2 matrix");
  const double den = b(0, 0) - b(0, 1) - b(1, 0) + b(1, 1);
  if (std::abs(den) < 1e-12) return {std::nullopt, true};
  const double first = (b(1, 1) - b(0, 1)) / den;
  if (!(first > 0.0 && first < 1.0)) return {std::nullopt, false};
  return {std::vector<double>{first, 1.0 - first}, false};
}

RestPointCheck is_rest_point(const Graph& g, const GameSpec& spec, StateView x, double tol) {
  const double residual = replicator_rhs(g, spec, x).max_abs();
  return {residual <= tol, residual};
}

double best_response_violation(const Graph& g, const GameSpec& spec, StateView x,
                               std::size_t v) {
  std::vector<double> p(spec.strategies());
  strategy_fitnesses(g, spec, x, v, p);
  const auto xv = x.at(v);
  double phi = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) phi += xv[s] * p[s];
  return *std::max_element(p.begin(), p.end()) - phi;
}

namespace {

void write_profile_header(std::ostream& os, std::size_t n) {
  for (std::size_t v = 0; v < n; ++v) os << (v ? "," : "") << "s_" << v + 1;
}

void write_profile(std::ostream& os, const PureProfile& profile) {
  for (std::size_t v = 0; v < profile.size(); ++v) os << (v ? "," : "") << profile[v] + 1;
}

}  // namespace

void write_equilibria_csv(std::ostream& os, std::size_t n, const EquilibriumReport& report) {
  write_profile_header(os, n);
  os << ",strict\n";
  for (const NashProfile& nash : report.pure_nash) {
    write_profile(os, nash.strategies);
    os << ',' << (nash.strict ? "strict" : "non-strict") << '\n';
  }
}

void write_tensor_csv(std::ostream& os, const PayoffTensor& tensor) {
  const std::size_t n = tensor.vertices();
  write_profile_header(os, n);
  for (std::size_t v = 0; v < n; ++v) os << ",pi_" << v + 1;
  os << '\n';
  for (std::size_t i = 0; i < tensor.profiles(); ++i) {
    write_profile(os, tensor.profile(i));
    for (std::size_t v = 0; v < n; ++v) os << ',' << format_real(tensor.at(i, v));
    os << '\n';
  }
}

}  // namespace regraph
