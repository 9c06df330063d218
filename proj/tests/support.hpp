#pragma once

// Random instance generators and brute-force oracles shared by the test
// binaries. The oracles work on plain nested vectors and never call into
// the library's payoff code.

#include <cstddef>
#include <random>
#include <vector>

#include "regraph/graph.hpp"
#include "regraph/payoff.hpp"

namespace regraph::testing {

using Matrix = std::vector<std::vector<double>>;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random weights in (0.1, 3) on roughly `density` of the off-diagonal pairs.
inline Graph random_graph(std::mt19937_64& rng, std::size_t n, double density = 0.6) {
  std::vector<double> w(n * n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t u = 0; u < n; ++u)
      if (u != v && uniform(rng, 0.0, 1.0) < density) w[v * n + u] = uniform(rng, 0.1, 3.0);
  return Graph::from_matrix(n, std::move(w));
}

inline PayoffMatrix random_matrix(std::mt19937_64& rng, std::size_t m, double lo = -2.0,
                                  double hi = 2.0) {
  PayoffMatrix b(m);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t r = 0; r < m; ++r) b(s, r) = uniform(rng, lo, hi);
  return b;
}

inline GameSpec random_game(std::mt19937_64& rng, std::size_t n, std::size_t m,
                            PayoffModel model = PayoffModel::WeightedAverage) {
  GameSpec spec;
  spec.model = model;
  for (std::size_t v = 0; v < n; ++v) spec.matrices.push_back(random_matrix(rng, m));
  return spec;
}

/// Interior point of the simplex, components bounded away from 0.
inline std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t m) {
  std::vector<double> x(m);
  double sum = 0.0;
  for (double& c : x) sum += (c = uniform(rng, 0.05, 1.0));
  for (double& c : x) c /= sum;
  return x;
}

inline StateProfile random_state(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  Matrix rows;
  for (std::size_t v = 0; v < n; ++v) rows.push_back(random_simplex_point(rng, m));
  return StateProfile::from_rows(rows);
}

inline Matrix dense(const Graph& g) {
  Matrix a(g.size(), std::vector<double>(g.size()));
  for (std::size_t v = 0; v < g.size(); ++v)
    for (std::size_t w = 0; w < g.size(); ++w) a[v][w] = g.weight(v, w);
  return a;
}

// --- oracles ---------------------------------------------------------------

/// Pure payoff: loop over out-neighbours, sum weight * b(s_v, s_w), then
/// divide by the independently summed row when averaging.
inline double oracle_pure_payoff(const Matrix& a, const Matrix& b,
                                 const std::vector<std::size_t>& profile, std::size_t v,
                                 bool average) {
  double total = 0.0;
  double d = 0.0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (a[v][w] > 0.0) {
      total += a[v][w] * b[profile[v]][profile[w]];
      d += a[v][w];
    }
  }
  if (!average) return total;
  return d > 0.0 ? total / d : 0.0;
}

/// p_{v,s} as the expectation of the pure payoff over opponents' mixed
/// strategies: sum over neighbours w and their strategies r of
/// a(v,w) x_{w,r} b(s,r), normalized under averaging.
inline double oracle_fitness(const Matrix& a, const Matrix& b, const Matrix& x, std::size_t v,
                             std::size_t s, bool average) {
  double total = 0.0;
  double d = 0.0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    d += a[v][w];
    for (std::size_t r = 0; r < b.size(); ++r) total += a[v][w] * x[w][r] * b[s][r];
  }
  if (d == 0.0) return 0.0;
  return average ? total / d : total;
}

/// Pure Nash set by a double loop over all M^N profiles, comparing every
/// unilateral deviation with the oracle payoff.
inline std::vector<std::vector<std::size_t>> oracle_pure_nash(const Matrix& a,
                                                              const std::vector<Matrix>& b,
                                                              std::size_t m, bool average) {
  const std::size_t n = a.size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= m;
  std::vector<std::vector<std::size_t>> nash;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> profile(n);
    std::size_t rest = code;
    for (std::size_t k = n; k-- > 0;) {
      profile[k] = rest % m;
      rest /= m;
    }
    bool stable = true;
    for (std::size_t v = 0; v < n && stable; ++v) {
      const double here = oracle_pure_payoff(a, b[v], profile, v, average);
      for (std::size_t alt = 0; alt < m && stable; ++alt) {
        auto dev = profile;
        dev[v] = alt;
        if (oracle_pure_payoff(a, b[v], dev, v, average) > here + 1e-12) stable = false;
      }
    }
    if (stable) nash.push_back(profile);
  }
  return nash;
}

inline std::vector<Matrix> matrices_of(const GameSpec& spec) {
  std::vector<Matrix> out;
  for (const auto& b : spec.matrices) out.push_back(b.rows());
  return out;
}

}  // namespace regraph::testing
