#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "regraph/graph.hpp"

namespace regraph {

/// WA averages the one-to-one payoffs over the outgoing weights, WS sums them.
enum class PayoffModel { WeightedAverage, WeightedSum };

std::string_view to_string(PayoffModel model);
PayoffModel payoff_model_from_string(std::string_view name);

/// Square M x M payoff matrix; entry (s, r) is earned playing s against r.
class PayoffMatrix {
 public:
  PayoffMatrix() = default;
  explicit PayoffMatrix(std::size_t m) : m_(m), entries_(m * m, 0.0) {}
  PayoffMatrix(std::initializer_list<std::initializer_list<double>> rows);
  static PayoffMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return m_; }
  double operator()(std::size_t s, std::size_t r) const { return entries_[s * m_ + r]; }
  double& operator()(std::size_t s, std::size_t r) { return entries_[s * m_ + r]; }

  std::vector<std::vector<double>> rows() const;

  PayoffMatrix scaled(double factor) const;
  PayoffMatrix shifted(double offset) const;

  friend bool operator==(const PayoffMatrix&, const PayoffMatrix&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<double> entries_;
};

/// Per-vertex payoff matrices plus the payoff model.
struct GameSpec {
  std::vector<PayoffMatrix> matrices;
  PayoffModel model = PayoffModel::WeightedAverage;

  /// Every vertex gets the same matrix.
  static GameSpec uniform(std::size_t n, const PayoffMatrix& b,
                          PayoffModel model = PayoffModel::WeightedAverage);

  std::size_t strategies() const { return matrices.empty() ? 0 : matrices.front().size(); }

  /// Throws ValidationError unless there are exactly n matrices, all M x M, M >= 2.
  void validate(std::size_t n) const;

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

/// Strategy per vertex, 0-based internally.
using PureProfile = std::vector<std::size_t>;

/// Non-owning row-major N x M block of per-vertex strategy weights. The
/// rows need not lie exactly on the simplex (integrator stages don't).
struct StateView {
  std::span<const double> data;
  std::size_t m = 0;

  std::size_t vertices() const { return m == 0 ? 0 : data.size() / m; }
  std::span<const double> at(std::size_t v) const { return data.subspan(v * m, m); }
};

/// One mixed strategy per vertex. Every row is a point of the simplex.
class StateProfile {
 public:
  /// Rows must be non-negative and sum to 1 within 1e-9; small deviations
  /// are renormalized away, larger ones throw ValidationError.
  static StateProfile from_rows(const std::vector<std::vector<double>>& rows);
  static StateProfile from_flat(std::size_t m, std::vector<double> data);
  static StateProfile pure(const PureProfile& profile, std::size_t m);

  std::size_t vertices() const noexcept { return m_ == 0 ? 0 : data_.size() / m_; }
  std::size_t strategies() const noexcept { return m_; }

  std::span<const double> at(std::size_t v) const { return {data_.data() + v * m_, m_}; }
  double operator()(std::size_t v, std::size_t s) const { return data_[v * m_ + s]; }

  std::span<const double> flat() const noexcept { return data_; }
  std::vector<std::vector<double>> rows() const;

  StateView view() const { return {data_, m_}; }
  operator StateView() const { return view(); }

  friend bool operator==(const StateProfile&, const StateProfile&) = default;

 private:
  StateProfile(std::size_t m, std::vector<double> data) : m_(m), data_(std::move(data)) {}

  std::size_t m_ = 0;
  std::vector<double> data_;
};

inline constexpr double kSimplexSnapTolerance = 1e-9;

/// Payoff of vertex v at a pure profile.
double pure_payoff(const Graph& g, const GameSpec& spec, const PureProfile& profile,
                   std::size_t v);

/// (1/d_v) sum_w a(v,w) x_w, the mixed strategy vertex v effectively faces.
/// Empty when v has no outgoing weight.
std::optional<std::vector<double>> environment_vector(const Graph& g, StateView x,
                                                      std::size_t v);

/// Payoff of pure strategy s at v against the current neighbourhood.
double strategy_fitness(const Graph& g, const GameSpec& spec, StateView x, std::size_t v,
                        std::size_t s);

/// All M strategy fitnesses of v written into out.
void strategy_fitnesses(const Graph& g, const GameSpec& spec, StateView x, std::size_t v,
                        std::span<double> out);

/// Expected payoff of v's current mixed strategy.
double expected_payoff(const Graph& g, const GameSpec& spec, StateView x, std::size_t v);

/// Payoffs of all vertices at all M^N pure profiles, profiles in
/// lexicographic order of (s_1, ..., s_N).
class PayoffTensor {
 public:
  PayoffTensor(std::size_t n, std::size_t m, std::vector<double> values);

  std::size_t vertices() const noexcept { return n_; }
  std::size_t strategies() const noexcept { return m_; }
  std::size_t profiles() const noexcept { return n_ == 0 ? 0 : values_.size() / n_; }

  double at(std::size_t profile_index, std::size_t v) const {
    return values_[profile_index * n_ + v];
  }
  double at(const PureProfile& profile, std::size_t v) const;

  PureProfile profile(std::size_t index) const;
  std::size_t index_of(const PureProfile& profile) const;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> values_;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Number of pure profiles M^N, or nullopt when it exceeds cap.
std::optional<std::size_t> profile_count(std::size_t n, std::size_t m, std::size_t cap);

/// Throws ValidationError when M^N exceeds cap.
PayoffTensor payoff_tensor(const Graph& g, const GameSpec& spec,
                           std::size_t cap = kDefaultEnumerationCap);

/// Advances profile to its lexicographic successor; false after the last one.
bool next_profile(PureProfile& profile, std::size_t m);

}  // namespace regraph
