#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "regraph/equilibria.hpp"
#include "regraph/format.hpp"
#include "regraph/scenario.hpp"

namespace regraph {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

void ScenarioOverrides::apply(ScenarioConfig& cfg) const {
  if (dt) cfg.run.integrator.dt = *dt;
  if (t_end) cfg.run.integrator.t_end = *t_end;
  if (steady_eps) cfg.run.steady_eps = *steady_eps;
  validate(cfg);
}

std::filesystem::path default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  if (env != nullptr && *env != '\0') return env;
  return ".";
}

void emit_snapshot(const RunResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  const StateProfile& x = result.final_state;
  out << "vertex";
  for (std::size_t s = 0; s < x.strategies(); ++s) out << ",x" << s + 1;
  out << '\n';
  for (std::size_t v = 0; v < x.vertices(); ++v) {
    out << v + 1;
    for (std::size_t s = 0; s < x.strategies(); ++s) out << ',' << format_real(x(v, s));
    out << '\n';
  }
  finish(out, path);
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunContext& ctx) {
  validate(cfg);
  const Graph g = build_graph(cfg.graph);
  const GameSpec spec = build_game(cfg.game, g.size());
  const StateProfile x0 = build_initial(cfg.initial, g.size(), spec.strategies());

  Trajectory traj;
  try {
    traj = integrate(g, spec, x0, cfg.run.integrator);
  } catch (const IntegrationError& e) {
    throw IntegrationError("scenario " + cfg.id + ": " + e.what());
  }
  const auto steady = detect_steady_state(traj, g, spec, cfg.run.steady_eps, cfg.run.steady_window);
  StateProfile last = traj.final_state();
  RunResult result{cfg.id, std::move(traj), steady, std::move(last)};

  for (const OutputSpec& o : cfg.outputs) {
    const std::filesystem::path path = ctx.out_dir / o.path;
    switch (o.kind) {
      case OutputKind::Snapshot:
        emit_snapshot(result, path);
        break;
      case OutputKind::Timecourse: {
        std::ofstream out = open_output(path);
        write_trajectory_csv(out, result.trajectory);
        finish(out, path);
        break;
      }
      case OutputKind::Average: {
        std::ofstream out = open_output(path);
        write_average_csv(out, result.trajectory);
        finish(out, path);
        break;
      }
      case OutputKind::Tensor: {
        const PayoffTensor tensor = payoff_tensor(g, spec);
        std::ofstream out = open_output(path);
        write_tensor_csv(out, tensor);
        finish(out, path);
        break;
      }
      case OutputKind::Equilibria: {
        const EquilibriumReport report = enumerate_pure_nash(g, spec);
        std::ofstream out = open_output(path);
        write_equilibria_csv(out, g.size(), report);
        finish(out, path);
        break;
      }
    }
  }
  return result;
}

std::vector<BatchItem> run_batch(const std::vector<std::filesystem::path>& paths,
                                 std::size_t parallelism, const RunContext& ctx) {
  std::vector<BatchItem> items(paths.size());
  auto run_one = [&](std::size_t i) {
    BatchItem& item = items[i];
    item.source = paths[i].string();
    try {
      ScenarioConfig cfg = parse_scenario(paths[i]);
      ctx.overrides.apply(cfg);
      item.result = run_scenario(cfg, ctx);
    } catch (const Error& e) {
      item.error = e.what();
      item.category = e.category();
    } catch (const std::exception& e) {
      item.error = e.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(paths.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < paths.size(); ++i) run_one(i);
    return items;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < paths.size(); i = next++) run_one(i);
    });
  }
  for (auto& t : pool) t.join();
  return items;
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::error_code ec;
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") out.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace regraph
