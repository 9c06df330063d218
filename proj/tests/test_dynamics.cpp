#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "regraph/dynamics.hpp"
#include "regraph/error.hpp"
#include "regraph/scenario.hpp"
#include "support.hpp"

using namespace regraph;
using testing::Matrix;

namespace {

std::vector<Graph> star_graphs() {
  const std::vector<VertexPair> heavy{{0, 1}, {0, 3}, {2, 3}, {1, 5}};
  return {build_star(StarKind::Open, 6), build_star(StarKind::Closed, 6),
          build_star(StarKind::WeightedAsymmetric, 6, 3.0, heavy)};
}

// x_{v,s} (p_{v,s} - phi_v) with p from the term-by-term oracle and phi as
// the x-weighted sum of those p.
Matrix oracle_rhs(const Graph& g, const GameSpec& spec, const StateProfile& x) {
  const auto a = testing::dense(g);
  const auto rows = x.rows();
  const bool average = spec.model == PayoffModel::WeightedAverage;
  Matrix out(g.size(), std::vector<double>(spec.strategies()));
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::vector<double> p(spec.strategies());
    double phi = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
      p[s] = testing::oracle_fitness(a, spec.matrices[v].rows(), rows, v, s, average);
      phi += rows[v][s] * p[s];
    }
    for (std::size_t s = 0; s < p.size(); ++s) out[v][s] = rows[v][s] * (p[s] - phi);
  }
  return out;
}

double sup_diff(const StateProfile& a, const StateProfile& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.flat().size(); ++i)
    m = std::max(m, std::abs(a.flat()[i] - b.flat()[i]));
  return m;
}

double discrete_error(const Graph& g, const GameSpec& spec, const StateProfile& x, double tau) {
  const auto next = discrete_step(g, spec, x, tau);
  const auto rhs = replicator_rhs(g, spec, x);
  double err = 0.0;
  for (std::size_t i = 0; i < rhs.values.size(); ++i)
    err = std::max(err, std::abs((next.flat()[i] - x.flat()[i]) / tau - rhs.values[i]));
  return err;
}

IntegratorOptions short_run(double t_end) {
  IntegratorOptions o;
  o.t_end = t_end;
  return o;
}

}  // namespace

TEST_CASE("rhs vanishes exactly on versor rows") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = testing::pick(rng, 1, 6), m = testing::pick(rng, 2, 3);
    const Graph g = testing::random_graph(rng, n);
    const auto spec = testing::random_game(rng, n, m);
    auto rows = testing::random_state(rng, n, m).rows();
    const std::size_t v = testing::pick(rng, 0, n - 1);
    rows[v].assign(m, 0.0);
    rows[v][testing::pick(rng, 0, m - 1)] = 1.0;
    const auto d = replicator_rhs(g, spec, StateProfile::from_rows(rows));
    for (double dx : d.at(v)) CHECK(dx == 0.0);
  }
}

TEST_CASE("rhs matches the brute-force evaluation") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = trial < 100 ? 3 : testing::pick(rng, 1, 6);
    const std::size_t m = testing::pick(rng, 2, 3);
    const Graph g = testing::random_graph(rng, n);
    const auto spec = testing::random_game(
        rng, n, m, trial % 2 ? PayoffModel::WeightedSum : PayoffModel::WeightedAverage);
    const auto x = testing::random_state(rng, n, m);
    const auto d = replicator_rhs(g, spec, x);
    const auto expect = oracle_rhs(g, spec, x);
    for (std::size_t v = 0; v < n; ++v) {
      double sum = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        CHECK(std::abs(d.at(v)[s] - expect[v][s]) <= 1e-12);
        sum += d.at(v)[s];
      }
      CHECK(std::abs(sum) <= 1e-12);
    }
  }
}

TEST_CASE("homogeneous states follow the classical field") {
  std::mt19937_64 rng(33);
  for (const Graph& g : star_graphs()) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t m = testing::pick(rng, 2, 3);
      const auto b = testing::random_matrix(rng, m);
      const auto c = testing::random_simplex_point(rng, m);
      const auto d = replicator_rhs(g, GameSpec::uniform(6, b), StateProfile::from_rows(Matrix(6, c)));
      const auto classical = classical_rhs(b, c);
      for (std::size_t v = 0; v < 6; ++v)
        for (std::size_t s = 0; s < m; ++s) CHECK(std::abs(d.at(v)[s] - classical[s]) <= 1e-14);
    }
  }
}

TEST_CASE("classical field rest points") {
  CHECK(classical_rhs(PayoffMatrix{{1, 0}, {0, 1}}, std::vector<double>{0.5, 0.5}) ==
        std::vector<double>{0.0, 0.0});
  for (double dx : classical_rhs(PayoffMatrix{{1, 0}, {0, 2}}, std::vector<double>{2.0 / 3, 1.0 / 3}))
    CHECK(std::abs(dx) <= 1e-15);
  for (double dx : classical_rhs(PayoffMatrix{{3, -1}, {2, 5}}, std::vector<double>{0.0, 1.0}))
    CHECK(dx == 0.0);
  CHECK_THROWS_AS(classical_rhs(PayoffMatrix{{1, 0}, {0, 1}}, std::vector<double>{1.0}),
                  ValidationError);
}

TEST_CASE("discrete map") {
  std::mt19937_64 rng(34);
  SUBCASE("versor rows stay put") {
    const Graph g = testing::random_graph(rng, 4, 1.0);
    const auto spec = testing::random_game(rng, 4, 3);
    const auto x = StateProfile::pure({0, 2, 1, 2}, 3);
    CHECK(discrete_step(g, spec, x, 0.05) == x);
  }
  SUBCASE("first-order approach to the continuous field") {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = testing::pick(rng, 2, 5), m = testing::pick(rng, 2, 3);
      const Graph g = testing::random_graph(rng, n, 0.8);
      const auto spec = testing::random_game(rng, n, m);
      const auto x = testing::random_state(rng, n, m);
      const double e3 = discrete_error(g, spec, x, 1e-3);
      const double e4 = discrete_error(g, spec, x, 1e-4);
      const double e5 = discrete_error(g, spec, x, 1e-5);
      if (e3 < 1e-9) continue;  // rhs second-order term happens to vanish
      CHECK(e3 / e4 == doctest::Approx(10.0).epsilon(0.05));
      CHECK(e4 / e5 == doctest::Approx(10.0).epsilon(0.1));
    }
  }
  SUBCASE("homogeneous profiles stay homogeneous") {
    for (const Graph& g : star_graphs()) {
      const auto b = testing::random_matrix(rng, 2);
      const auto c = testing::random_simplex_point(rng, 2);
      const auto next = discrete_step(g, GameSpec::uniform(6, b), StateProfile::from_rows(Matrix(6, c)), 0.1);
      for (std::size_t v = 1; v < 6; ++v)
        for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(next(v, s) - next(0, s)) <= 1e-15);
    }
  }
  SUBCASE("rejections") {
    const Graph g = build_star(StarKind::Open, 3);
    const auto spec = GameSpec::uniform(3, PayoffMatrix{{-10, -10}, {-10, -10}});
    const auto x = StateProfile::from_rows(Matrix(3, {0.5, 0.5}));
    CHECK_THROWS_AS(discrete_step(g, spec, x, 0.2), IntegrationError);
    CHECK_THROWS_AS(discrete_step(g, spec, x, 0.0), ValidationError);
  }
}

TEST_CASE("integrator options") {
  CHECK_NOTHROW(IntegratorOptions{}.validate());
  IntegratorOptions o;
  o.dt = 0.0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
  o = {};
  o.t_end = -1.0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
  o = {};
  o.sample_every = 0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
  o = {};
  o.renormalize_every = 0;
  CHECK_THROWS_AS(o.validate(), ValidationError);
}

TEST_CASE("trajectory sampling") {
  const Graph g = build_star(StarKind::Closed, 6);
  const auto spec = GameSpec::uniform(6, bistable_matrix(1.0));
  const auto x0 = initial_condition(InitialPreset::CentralOutlayer, 6);

  const auto traj = integrate(g, spec, x0, short_run(2.0));
  REQUIRE(traj.times.size() == 21);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(2.0).epsilon(1e-12));
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
  CHECK(traj.states.front() == x0);
  CHECK(traj.diagnostics.size() == traj.times.size());

  // t_end not a multiple of the sampling period still ends with t_end.
  const auto odd = integrate(g, spec, x0, short_run(0.25));
  CHECK(odd.times.size() == 4);
  CHECK(odd.times.back() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("pure starting profiles stay constant") {
  const Graph g = build_star(StarKind::Open, 6);
  const auto spec = GameSpec::uniform(6, prisoner_matrix(1.5));
  const auto x0 = StateProfile::pure({0, 1, 1, 0, 1, 0}, 2);
  const auto traj = integrate(g, spec, x0, short_run(5.0));
  for (const auto& x : traj.states) CHECK(x == x0);
}

TEST_CASE("property: trajectories stay on the simplex") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = testing::pick(rng, 1, 6), m = testing::pick(rng, 2, 3);
    const Graph g = testing::random_graph(rng, n);
    const auto spec = testing::random_game(rng, n, m);
    const auto traj = integrate(g, spec, testing::random_state(rng, n, m), short_run(10.0));
    CHECK(traj.worst_residual < 1e-6);
    CHECK(traj.min_component > kInstabilityThreshold);
    for (const auto& x : traj.states) {
      for (std::size_t v = 0; v < n; ++v) {
        double sum = 0.0;
        for (double c : x.at(v)) {
          CHECK(c >= 0.0);
          sum += c;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
      }
    }
  }
}

TEST_CASE("property: homogeneity is preserved under averaging") {
  std::mt19937_64 rng(36);
  for (const Graph& g : star_graphs()) {
    const std::size_t m = testing::pick(rng, 2, 3);
    const auto b = testing::random_matrix(rng, m);
    const auto x0 = StateProfile::from_rows(Matrix(6, testing::random_simplex_point(rng, m)));
    const auto traj = integrate(g, GameSpec::uniform(6, b), x0, short_run(10.0));
    for (const auto& x : traj.states)
      for (std::size_t v = 1; v < 6; ++v)
        for (std::size_t s = 0; s < m; ++s) CHECK(std::abs(x(v, s) - x(0, s)) <= 1e-10);
  }
}

TEST_CASE("property: a constant shift of every matrix leaves trajectories unchanged") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = testing::pick(rng, 2, 5), m = testing::pick(rng, 2, 3);
    const Graph g = testing::random_graph(rng, n, 1.0);
    const auto spec = testing::random_game(rng, n, m);
    GameSpec shifted = spec;
    const double c = testing::uniform(rng, -3.0, 3.0);
    for (auto& b : shifted.matrices) b = b.shifted(c);
    const auto x0 = testing::random_state(rng, n, m);
    const auto a = integrate(g, spec, x0, short_run(10.0));
    const auto b = integrate(g, shifted, x0, short_run(10.0));
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(sup_diff(a.states[i], b.states[i]) <= 1e-9);
  }
}

TEST_CASE("graph integration of a homogeneous start equals the classical run") {
  const auto b = PayoffMatrix{{0.5, -1}, {1.5, 0.2}};
  const std::vector<double> y0{0.3, 0.7};
  const auto classical = integrate_classical(b, y0, short_run(10.0));
  for (const Graph& g : star_graphs()) {
    const auto traj = integrate(g, GameSpec::uniform(6, b), StateProfile::from_rows(Matrix(6, y0)),
                                short_run(10.0));
    REQUIRE(traj.times.size() == classical.times.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i)
      for (std::size_t v = 0; v < 6; ++v)
        for (std::size_t s = 0; s < 2; ++s)
          CHECK(std::abs(traj.states[i](v, s) - classical.states[i](0, s)) <= 1e-8);
  }
}

TEST_CASE("numerical blow-up aborts the run") {
  const Graph g = build_star(StarKind::Open, 4);
  const auto spec = GameSpec::uniform(4, PayoffMatrix{{0, -400}, {400, 0}});
  const auto x0 = StateProfile::from_rows(Matrix(4, {0.5, 0.5}));
  IntegratorOptions o;
  o.dt = 0.05;
  o.t_end = 5.0;
  CHECK_THROWS_AS(integrate(g, spec, x0, o), IntegrationError);
}

TEST_CASE("steady-state detection") {
  const Graph g = build_star(StarKind::Open, 6);

  SUBCASE("constant trajectory settles at once") {
    const auto spec = GameSpec::uniform(6, bistable_matrix(1.0));
    const auto traj = integrate(g, spec, StateProfile::pure(PureProfile(6, 0), 2), short_run(10.0));
    CHECK(detect_steady_state(traj, g, spec) == 0.0);
  }
  SUBCASE("bistable homogeneous start settles before t = 50") {
    const auto spec = GameSpec::uniform(6, bistable_matrix(1.0));
    const auto traj = integrate(g, spec, initial_condition(InitialPreset::Homogeneous, 6), short_run(50.0));
    const auto t = detect_steady_state(traj, g, spec, 1e-6, 5.0);
    REQUIRE(t.has_value());
    CHECK(*t < 50.0);
    CHECK(*t > 0.0);
  }
  SUBCASE("a rotation never settles") {
    // Rock-paper-scissors around a neutral centre keeps cycling.
    const auto spec = GameSpec::uniform(6, PayoffMatrix{{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
    const auto x0 = StateProfile::from_rows(Matrix(6, {0.6, 0.3, 0.1}));
    const auto traj = integrate(g, spec, x0, short_run(20.0));
    CHECK_FALSE(detect_steady_state(traj, g, spec).has_value());
  }
  SUBCASE("window longer than the run") {
    const auto spec = GameSpec::uniform(6, bistable_matrix(1.0));
    const auto traj = integrate(g, spec, initial_condition(InitialPreset::Homogeneous, 6), short_run(2.0));
    CHECK_THROWS_AS(detect_steady_state(traj, g, spec, 1e-6, 5.0), ValidationError);
  }
}

TEST_CASE("trajectory csv formats") {
  const Graph g = build_star(StarKind::Open, 3);
  const auto spec = GameSpec::uniform(3, bistable_matrix(1.0));
  const auto x0 = StateProfile::pure({0, 1, 0}, 2);
  IntegratorOptions o;
  o.t_end = 0.2;
  const auto traj = integrate(g, spec, x0, o);

  std::ostringstream long_form;
  write_trajectory_csv(long_form, traj);
  std::istringstream in(long_form.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,vertex,strategy,x");
  std::getline(in, line);
  CHECK(line == "0,1,1,1");
  std::getline(in, line);
  CHECK(line == "0,1,2,0");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3 * 6 - 2);

  std::ostringstream avg;
  write_average_csv(avg, traj);
  CHECK(avg.str().rfind("t,mean_x1,mean_x2\n0,0.666666666667,0.333333333333\n", 0) == 0);
}
