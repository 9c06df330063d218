// regraph: command-line front end for scenario runs, payoff tensors and
// pure equilibria of replicator games on graphs.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "regraph/equilibria.hpp"
#include "regraph/format.hpp"
#include "regraph/scenario.hpp"

#ifndef REGRAPH_SCENARIO_DIR
#define REGRAPH_SCENARIO_DIR "scenarios/figures"
#endif

namespace {

using namespace regraph;

int exit_code(ErrorCategory c) { return static_cast<int>(c); }

void print_result(const RunResult& r) {
  std::cout << r.scenario_id << ": t_end=" << format_real(r.trajectory.times.back())
            << " steady_time="
            << (r.steady_time ? format_real(*r.steady_time) : std::string("none"))
            << " final_max_rate=" << format_real(r.trajectory.diagnostics.back().max_derivative)
            << " max_residual=" << format_real(r.trajectory.worst_residual) << "\n";
  for (std::size_t v = 0; v < r.final_state.vertices(); ++v) {
    std::cout << "  vertex " << v + 1 << ":";
    for (double x : r.final_state.at(v)) std::cout << ' ' << format_real(x);
    std::cout << '\n';
  }
}

// Writes to path, or stdout when path is empty.
template <class Writer>
void write_to(const std::string& path, Writer&& writer) {
  if (path.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replicator dynamics on weighted directed graphs"};
  app.require_subcommand(1);

  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> eps;
  std::string out_dir;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dt", dt, "Integrator step (overrides run.dt)");
    cmd->add_option("--t-end", t_end, "Final time (overrides run.t_end)");
    cmd->add_option("--eps", eps, "Steady-state threshold (overrides run.steady_eps)");
    cmd->add_option("--out", out_dir,
                    std::string("Output directory (default: $") + kOutDirEnv + " or .)");
  };

  std::string config;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario file");
  simulate->add_option("config", config, "Scenario JSON")->required();
  add_run_flags(simulate);

  std::string batch_dir;
  std::size_t jobs = 1;
  auto* batch = app.add_subcommand("batch", "Run every scenario file in a directory");
  batch->add_option("dir", batch_dir, "Directory of scenario JSON files")->required();
  batch->add_option("-j,--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
  add_run_flags(batch);

  std::string output;
  auto* tensor = app.add_subcommand("tensor", "Dump the payoff tensor as CSV");
  tensor->add_option("config", config, "Scenario JSON")->required();
  tensor->add_option("-o,--output", output, "CSV path (default: stdout)");

  auto* equilibria = app.add_subcommand("equilibria", "List pure Nash equilibria as CSV");
  equilibria->add_option("config", config, "Scenario JSON")->required();
  equilibria->add_option("-o,--output", output, "CSV path (default: stdout)");

  std::string list_dir = REGRAPH_SCENARIO_DIR;
  auto* scenarios = app.add_subcommand("scenarios", "Inspect the shipped scenarios");
  scenarios->require_subcommand(1);
  auto* list = scenarios->add_subcommand("list", "List scenario ids and descriptions");
  list->add_option("--dir", list_dir, "Scenario directory");

  CLI11_PARSE(app, argc, argv);

  RunContext ctx;
  ctx.out_dir = out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir);
  ctx.overrides = {dt, t_end, eps};

  try {
    if (*simulate) {
      ScenarioConfig cfg = parse_scenario(config);
      ctx.overrides.apply(cfg);
      print_result(run_scenario(cfg, ctx));
      return 0;
    }
    if (*batch) {
      const auto items = run_batch(list_scenarios(batch_dir), jobs, ctx);
      int code = 0;
      for (const BatchItem& item : items) {
        if (item.ok()) {
          print_result(*item.result);
        } else {
          std::cerr << "error: " << item.error << '\n';
          if (code == 0) code = item.category ? exit_code(*item.category) : 1;
        }
      }
      return code;
    }
    if (*tensor || *equilibria) {
      const ScenarioConfig cfg = parse_scenario(config);
      const Graph g = build_graph(cfg.graph);
      const GameSpec spec = build_game(cfg.game, g.size());
      if (*tensor) {
        const PayoffTensor t = payoff_tensor(g, spec);
        write_to(output, [&](std::ostream& os) { write_tensor_csv(os, t); });
      } else {
        const EquilibriumReport report = enumerate_pure_nash(g, spec);
        write_to(output, [&](std::ostream& os) { write_equilibria_csv(os, g.size(), report); });
      }
      return 0;
    }
    if (*list) {
      for (const auto& path : list_scenarios(list_dir)) {
        const ScenarioConfig cfg = parse_scenario(path);
        std::cout << cfg.id << '\t' << cfg.description << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
