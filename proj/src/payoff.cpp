#include "regraph/payoff.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "regraph/error.hpp"

namespace regraph {

namespace {

void check_vertex(const Graph& g, std::size_t v) {
  if (v >= g.size()) throw ValidationError("vertex " + std::to_string(v) + " out of range");
}

void check_state(const Graph& g, const GameSpec& spec, StateView x) {
  if (x.m != spec.strategies() || x.data.size() != g.size() * x.m) {
    throw ValidationError("state dimensions do not match graph and game");
  }
}

void check_matrix_count(const Graph& g, const GameSpec& spec) {
  if (spec.matrices.size() != g.size()) {
    throw ValidationError("game has " + std::to_string(spec.matrices.size()) +
                          " payoff matrices for " + std::to_string(g.size()) + " vertices");
  }
}

// (1/d_v) sum_w a(v,w) x_w into env, for d_v > 0. Written as the first
// out-neighbour's state plus weighted offsets from it, so neighbours that
// all hold the same state give back exactly that state; otherwise a
// homogeneous profile could pick up rounding noise that some graphs amplify.
void mean_neighbour_state(const Graph& g, StateView x, std::size_t v, double d,
                          std::span<double> env) {
  const auto row = g.row(v);
  std::size_t anchor = 0;
  while (row[anchor] == 0.0) ++anchor;
  const auto base = x.at(anchor);
  std::fill(env.begin(), env.end(), 0.0);
  for (std::size_t w = anchor + 1; w < row.size(); ++w) {
    if (row[w] == 0.0) continue;
    const auto xw = x.at(w);
    for (std::size_t r = 0; r < env.size(); ++r) env[r] += row[w] * (xw[r] - base[r]);
  }
  for (std::size_t r = 0; r < env.size(); ++r) env[r] = base[r] + env[r] / d;
}

// Effective matrix factor: WA uses B_v, WS uses d_v B_v.
double model_factor(const Graph& g, const GameSpec& spec, std::size_t v) {
  return spec.model == PayoffModel::WeightedSum ? g.out_weight(v) : 1.0;
}

}  // namespace

std::string_view to_string(PayoffModel model) {
  return model == PayoffModel::WeightedAverage ? "WA" : "WS";
}

PayoffModel payoff_model_from_string(std::string_view name) {
  if (name == "WA") return PayoffModel::WeightedAverage;
  if (name == "WS") return PayoffModel::WeightedSum;
  throw ValidationError("unknown payoff model '" + std::string(name) + "' (valid: WA, WS)");
}

PayoffMatrix::PayoffMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : m_(rows.size()) {
  entries_.reserve(m_ * m_);
  for (const auto& row : rows) {
    if (row.size() != m_) throw ValidationError("payoff matrix must be square");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

PayoffMatrix PayoffMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  PayoffMatrix b(rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s) {
    if (rows[s].size() != rows.size()) {
      throw ValidationError("payoff matrix row " + std::to_string(s + 1) + " has " +
                            std::to_string(rows[s].size()) + " entries, expected " +
                            std::to_string(rows.size()));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) b(s, r) = rows[s][r];
  }
  return b;
}

std::vector<std::vector<double>> PayoffMatrix::rows() const {
  std::vector<std::vector<double>> out(m_, std::vector<double>(m_));
  for (std::size_t s = 0; s < m_; ++s)
    for (std::size_t r = 0; r < m_; ++r) out[s][r] = (*this)(s, r);
  return out;
}

PayoffMatrix PayoffMatrix::scaled(double factor) const {
  PayoffMatrix b = *this;
  for (double& e : b.entries_) e *= factor;
  return b;
}

PayoffMatrix PayoffMatrix::shifted(double offset) const {
  PayoffMatrix b = *this;
  for (double& e : b.entries_) e += offset;
  return b;
}

GameSpec GameSpec::uniform(std::size_t n, const PayoffMatrix& b, PayoffModel model) {
  return GameSpec{std::vector<PayoffMatrix>(n, b), model};
}

void GameSpec::validate(std::size_t n) const {
  if (matrices.size() != n) {
    throw ValidationError("game has " + std::to_string(matrices.size()) +
                          " payoff matrices, graph has " + std::to_string(n) + " vertices");
  }
  const std::size_t m = strategies();
  if (m < 2) throw ValidationError("games need at least 2 strategies");
  for (std::size_t v = 0; v < matrices.size(); ++v) {
    if (matrices[v].size() != m) {
      throw ValidationError("payoff matrix of vertex " + std::to_string(v + 1) + " is " +
                            std::to_string(matrices[v].size()) + "x" +
                            std::to_string(matrices[v].size()) + ", expected " +
                            std::to_string(m) + "x" + std::to_string(m));
    }
    for (std::size_t s = 0; s < m; ++s)
      for (std::size_t r = 0; r < m; ++r)
        if (!std::isfinite(matrices[v](s, r)))
          throw ValidationError("payoff matrix of vertex " + std::to_string(v + 1) +
                                " has a non-finite entry");
  }
}

StateProfile StateProfile::from_flat(std::size_t m, std::vector<double> data) {
  if (m == 0 || data.empty() || data.size() % m != 0) {
    throw ValidationError("state data is not a whole number of rows");
  }
  const std::size_t n = data.size() / m;
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const double value = data[v * m + s];
      if (!std::isfinite(value) || value < 0.0) {
        throw ValidationError("state of vertex " + std::to_string(v + 1) +
                              " has a negative or non-finite component");
      }
      sum += value;
    }
    if (std::abs(sum - 1.0) > kSimplexSnapTolerance) {
      throw ValidationError("state of vertex " + std::to_string(v + 1) + " sums to " +
                            std::to_string(sum) + ", not 1");
    }
    if (sum != 1.0) {
      for (std::size_t s = 0; s < m; ++s) data[v * m + s] /= sum;
    }
  }
  return StateProfile(m, std::move(data));
}

StateProfile StateProfile::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("state needs at least one vertex");
  const std::size_t m = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * m);
  for (std::size_t v = 0; v < rows.size(); ++v) {
    if (rows[v].size() != m) {
      throw ValidationError("state of vertex " + std::to_string(v + 1) + " has " +
                            std::to_string(rows[v].size()) + " components, expected " +
                            std::to_string(m));
    }
    data.insert(data.end(), rows[v].begin(), rows[v].end());
  }
  return from_flat(m, std::move(data));
}

StateProfile StateProfile::pure(const PureProfile& profile, std::size_t m) {
  std::vector<double> data(profile.size() * m, 0.0);
  for (std::size_t v = 0; v < profile.size(); ++v) {
    if (profile[v] >= m) throw ValidationError("strategy index out of range");
    data[v * m + profile[v]] = 1.0;
  }
  return from_flat(m, std::move(data));
}

std::vector<std::vector<double>> StateProfile::rows() const {
  std::vector<std::vector<double>> out;
  for (std::size_t v = 0; v < vertices(); ++v) out.emplace_back(at(v).begin(), at(v).end());
  return out;
}

double pure_payoff(const Graph& g, const GameSpec& spec, const PureProfile& profile,
                   std::size_t v) {
  check_vertex(g, v);
  check_matrix_count(g, spec);
  const std::size_t m = spec.strategies();
  if (profile.size() != g.size()) throw ValidationError("profile length does not match graph");
  for (std::size_t s : profile)
    if (s >= m) throw ValidationError("strategy index out of range");

  const PayoffMatrix& b = spec.matrices[v];
  const auto row = g.row(v);
  double sum = 0.0;
  for (std::size_t w = 0; w < row.size(); ++w) {
    if (row[w] != 0.0) sum += row[w] * b(profile[v], profile[w]);
  }
  if (spec.model == PayoffModel::WeightedSum) return sum;
  const double d = g.out_weight(v);
  return d > 0.0 ? sum / d : 0.0;
}

std::optional<std::vector<double>> environment_vector(const Graph& g, StateView x,
                                                      std::size_t v) {
  check_vertex(g, v);
  if (x.data.size() != g.size() * x.m) {
    throw ValidationError("state dimensions do not match graph");
  }
  const double d = g.out_weight(v);
  if (!(d > 0.0)) return std::nullopt;
  std::vector<double> env(x.m);
  mean_neighbour_state(g, x, v, d, env);
  return env;
}

void strategy_fitnesses(const Graph& g, const GameSpec& spec, StateView x, std::size_t v,
                        std::span<double> out) {
  check_vertex(g, v);
  check_matrix_count(g, spec);
  check_state(g, spec, x);
  const std::size_t m = x.m;
  const double d = g.out_weight(v);
  if (!(d > 0.0)) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::vector<double> env(m);
  mean_neighbour_state(g, x, v, d, env);

  const PayoffMatrix& b = spec.matrices[v];
  const double factor = model_factor(g, spec, v);
  for (std::size_t s = 0; s < m; ++s) {
    double p = 0.0;
    for (std::size_t r = 0; r < m; ++r) p += b(s, r) * env[r];
    out[s] = factor * p;
  }
}

double strategy_fitness(const Graph& g, const GameSpec& spec, StateView x, std::size_t v,
                        std::size_t s) {
  if (s >= spec.strategies()) throw ValidationError("strategy index out of range");
  std::vector<double> p(spec.strategies());
  strategy_fitnesses(g, spec, x, v, p);
  return p[s];
}

double expected_payoff(const Graph& g, const GameSpec& spec, StateView x, std::size_t v) {
  std::vector<double> p(spec.strategies());
  strategy_fitnesses(g, spec, x, v, p);
  const auto xv = x.at(v);
  double phi = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) phi += xv[s] * p[s];
  return phi;
}

PayoffTensor::PayoffTensor(std::size_t n, std::size_t m, std::vector<double> values)
    : n_(n), m_(m), values_(std::move(values)) {}

double PayoffTensor::at(const PureProfile& profile, std::size_t v) const {
  return at(index_of(profile), v);
}

PureProfile PayoffTensor::profile(std::size_t index) const {
  PureProfile p(n_);
  for (std::size_t k = n_; k-- > 0;) {
    p[k] = index % m_;
    index /= m_;
  }
  return p;
}

std::size_t PayoffTensor::index_of(const PureProfile& profile) const {
  if (profile.size() != n_) throw ValidationError("profile length does not match tensor");
  std::size_t index = 0;
  for (std::size_t s : profile) {
    if (s >= m_) throw ValidationError("strategy index out of range");
    index = index * m_ + s;
  }
  return index;
}

std::optional<std::size_t> profile_count(std::size_t n, std::size_t m, std::size_t cap) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (count > cap / m) return std::nullopt;
    count *= m;
  }
  if (count > cap) return std::nullopt;
  return count;
}

bool next_profile(PureProfile& profile, std::size_t m) {
  for (std::size_t k = profile.size(); k-- > 0;) {
    if (++profile[k] < m) return true;
    profile[k] = 0;
  }
  return false;
}

PayoffTensor payoff_tensor(const Graph& g, const GameSpec& spec, std::size_t cap) {
  spec.validate(g.size());
  const std::size_t n = g.size();
  const std::size_t m = spec.strategies();
  const auto count = profile_count(n, m, cap);
  if (!count) {
    throw ValidationError("payoff tensor needs " + std::to_string(m) + "^" + std::to_string(n) +
                          " profiles, above the enumeration cap of " + std::to_string(cap));
  }
  std::vector<double> values;
  values.reserve(*count * n);
  PureProfile profile(n, 0);
  do {
    for (std::size_t v = 0; v < n; ++v) values.push_back(pure_payoff(g, spec, profile, v));
  } while (next_profile(profile, m));
  return PayoffTensor(n, m, std::move(values));
}

}  // namespace regraph
