#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "regraph/dynamics.hpp"
#include "regraph/error.hpp"
#include "regraph/graph.hpp"
#include "regraph/payoff.hpp"

namespace regraph {

// ---------------------------------------------------------------------------
// Presets

/// [[1, 0], [0, theta]]: two strict pure equilibria, theta > 0.
PayoffMatrix bistable_matrix(double theta);
/// [[1, 0], [theta, 0]]: cooperate / defect, theta > 1.
PayoffMatrix prisoner_matrix(double theta);
/// [[0, 1], [1, 0]]: unique interior equilibrium.
PayoffMatrix coexistence_matrix();

enum class InitialPreset { Homogeneous, ExternalOutlayer, CentralOutlayer, ExternalCentral };

std::string_view to_string(InitialPreset preset);
InitialPreset initial_preset_from_string(std::string_view name);

inline constexpr double kQuasiPure = 0.99;

/// Two-strategy starting profiles on a star with the hub at vertex 0 and
/// "external" vertex 1. Every vertex starts at [q, 1-q] except the
/// outlayers, which start at [1-q, q].
StateProfile initial_condition(InitialPreset preset, std::size_t n, double q = kQuasiPure,
                               std::size_t strategies = 2);

// ---------------------------------------------------------------------------
// Scenario configuration. Vertex indices are 0-based here and 1-based in
// the JSON files.

struct StarGraphConfig {
  StarKind kind = StarKind::Open;
  std::size_t n = 6;
  double heavy_weight = 3.0;
  std::vector<VertexPair> heavy_edges;

  friend bool operator==(const StarGraphConfig&, const StarGraphConfig&) = default;
};

struct InlineGraphConfig {
  std::size_t n = 0;
  std::vector<Edge> edges;

  friend bool operator==(const InlineGraphConfig&, const InlineGraphConfig&) = default;
};

using GraphConfig = std::variant<StarGraphConfig, InlineGraphConfig>;

enum class GamePreset { Bistable, Prisoner, Coexistence };

std::string_view to_string(GamePreset preset);
GamePreset game_preset_from_string(std::string_view name);

struct PresetGame {
  GamePreset preset = GamePreset::Bistable;
  double theta = 1.0;  // unused by coexistence

  friend bool operator==(const PresetGame&, const PresetGame&) = default;
};

/// One matrix shared by all vertices, or exactly one per vertex.
struct ExplicitGame {
  std::vector<PayoffMatrix> matrices;

  friend bool operator==(const ExplicitGame&, const ExplicitGame&) = default;
};

struct GameConfig {
  std::variant<PresetGame, ExplicitGame> payoffs;
  PayoffModel model = PayoffModel::WeightedAverage;

  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct PresetInitial {
  InitialPreset preset = InitialPreset::Homogeneous;
  double q = kQuasiPure;

  friend bool operator==(const PresetInitial&, const PresetInitial&) = default;
};

struct ExplicitInitial {
  std::vector<std::vector<double>> vectors;

  friend bool operator==(const ExplicitInitial&, const ExplicitInitial&) = default;
};

using InitialConfig = std::variant<PresetInitial, ExplicitInitial>;

struct RunConfig {
  IntegratorOptions integrator;
  double steady_eps = kDefaultSteadyEps;
  double steady_window = kDefaultSteadyWindow;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class OutputKind { Timecourse, Snapshot, Average, Tensor, Equilibria };

std::string_view to_string(OutputKind kind);
OutputKind output_kind_from_string(std::string_view name);

struct OutputSpec {
  OutputKind kind = OutputKind::Snapshot;
  std::string path;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ScenarioConfig {
  std::string id;
  std::string description;
  GraphConfig graph;
  GameConfig game;
  InitialConfig initial;
  RunConfig run;
  std::vector<OutputSpec> outputs;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Cross-checks vertex and strategy counts, preset parameter ranges and run
/// options. Throws ValidationError naming the offending fields.
void validate(const ScenarioConfig& cfg);

std::size_t vertex_count(const GraphConfig& graph);
Graph build_graph(const GraphConfig& graph);
GameSpec build_game(const GameConfig& game, std::size_t n);
StateProfile build_initial(const InitialConfig& initial, std::size_t n, std::size_t m);

/// Parses and validates a scenario document. source names the input in
/// error messages. Throws ParseError (with line and column) or
/// ValidationError.
ScenarioConfig parse_scenario_text(std::string_view text, const std::string& source = "<input>");

/// Reads path and calls parse_scenario_text. Throws IoError when unreadable.
ScenarioConfig parse_scenario(const std::filesystem::path& path);

/// Canonical JSON rendering; parse_scenario_text(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& cfg);

// ---------------------------------------------------------------------------
// Running

struct RunResult {
  std::string scenario_id;
  Trajectory trajectory;
  std::optional<double> steady_time;
  StateProfile final_state;
};

/// Command-line overrides applied on top of a parsed config.
struct ScenarioOverrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> steady_eps;

  /// Applies the set fields and revalidates.
  void apply(ScenarioConfig& cfg) const;
};

struct RunContext {
  /// Relative output paths are resolved against this directory.
  std::filesystem::path out_dir = ".";
  ScenarioOverrides overrides;
};

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "REGRAPH_OUT_DIR";

/// $REGRAPH_OUT_DIR when set and non-empty, "." otherwise.
std::filesystem::path default_out_dir();

/// Builds, integrates, detects the steady state and writes every requested
/// output. Integrator failures are rethrown with the scenario id prepended.
RunResult run_scenario(const ScenarioConfig& cfg, const RunContext& ctx = {});

struct BatchItem {
  std::string source;
  std::optional<RunResult> result;
  std::string error;  // empty on success
  std::optional<ErrorCategory> category;

  bool ok() const { return result.has_value(); }
};

/// Parses and runs every file, up to parallelism at a time. Items come back
/// in input order; a failing item never aborts the others.
std::vector<BatchItem> run_batch(const std::vector<std::filesystem::path>& paths,
                                 std::size_t parallelism, const RunContext& ctx = {});

/// Sorted *.json files directly inside dir.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

/// CSV `vertex,x1,...,xM` of the final state.
void emit_snapshot(const RunResult& result, const std::filesystem::path& path);

}  // namespace regraph
