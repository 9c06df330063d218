#include "regraph/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace regraph {

using json = nlohmann::json;

PayoffMatrix bistable_matrix(double theta) { return {{1.0, 0.0}, {0.0, theta}}; }
PayoffMatrix prisoner_matrix(double theta) { return {{1.0, 0.0}, {theta, 0.0}}; }
PayoffMatrix coexistence_matrix() { return {{0.0, 1.0}, {1.0, 0.0}}; }

std::string_view to_string(InitialPreset preset) {
  switch (preset) {
    case InitialPreset::Homogeneous:
      return "homogeneous";
    case InitialPreset::ExternalOutlayer:
      return "external_outlayer";
    case InitialPreset::CentralOutlayer:
      return "central_outlayer";
    case InitialPreset::ExternalCentral:
      return "external_central";
  }
  return "?";
}

InitialPreset initial_preset_from_string(std::string_view name) {
  for (auto p : {InitialPreset::Homogeneous, InitialPreset::ExternalOutlayer,
                 InitialPreset::CentralOutlayer, InitialPreset::ExternalCentral}) {
    if (name == to_string(p)) return p;
  }
  throw ValidationError("unknown initial condition preset '" + std::string(name) +
                        "' (valid: homogeneous, external_outlayer, central_outlayer, "
                        "external_central)");
}

StateProfile initial_condition(InitialPreset preset, std::size_t n, double q,
                               std::size_t strategies) {
  if (strategies != 2) {
    throw ValidationError("initial condition presets need 2 strategies; give explicit vectors");
  }
  if (n < 3) throw ValidationError("initial condition presets need at least 3 vertices");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quasi-pure level q must lie in [0, 1]");

  const bool hub_flipped =
      preset == InitialPreset::CentralOutlayer || preset == InitialPreset::ExternalCentral;
  const bool external_flipped =
      preset == InitialPreset::ExternalOutlayer || preset == InitialPreset::ExternalCentral;

  std::vector<std::vector<double>> rows(n, {q, 1.0 - q});
  if (hub_flipped) rows[0] = {1.0 - q, q};
  if (external_flipped) rows[1] = {1.0 - q, q};
  return StateProfile::from_rows(rows);
}

std::string_view to_string(GamePreset preset) {
  switch (preset) {
    case GamePreset::Bistable:
      return "bistable";
    case GamePreset::Prisoner:
      return "prisoner";
    case GamePreset::Coexistence:
      return "coexistence";
  }
  return "?";
}

GamePreset game_preset_from_string(std::string_view name) {
  for (auto p : {GamePreset::Bistable, GamePreset::Prisoner, GamePreset::Coexistence}) {
    if (name == to_string(p)) return p;
  }
  throw ValidationError("unknown game preset '" + std::string(name) +
                        "' (valid: bistable, prisoner, coexistence)");
}

std::string_view to_string(OutputKind kind) {
  switch (kind) {
    case OutputKind::Timecourse:
      return "timecourse";
    case OutputKind::Snapshot:
      return "snapshot";
    case OutputKind::Average:
      return "average";
    case OutputKind::Tensor:
      return "tensor";
    case OutputKind::Equilibria:
      return "equilibria";
  }
  return "?";
}

OutputKind output_kind_from_string(std::string_view name) {
  for (auto k : {OutputKind::Timecourse, OutputKind::Snapshot, OutputKind::Average,
                 OutputKind::Tensor, OutputKind::Equilibria}) {
    if (name == to_string(k)) return k;
  }
  throw ValidationError("unknown output kind '" + std::string(name) +
                        "' (valid: timecourse, snapshot, average, tensor, equilibria)");
}

// ---------------------------------------------------------------------------
// Building

std::size_t vertex_count(const GraphConfig& graph) {
  return std::visit([](const auto& g) { return g.n; }, graph);
}

Graph build_graph(const GraphConfig& graph) {
  if (const auto* star = std::get_if<StarGraphConfig>(&graph)) {
    return build_star(star->kind, star->n, star->heavy_weight, star->heavy_edges);
  }
  const auto& inline_graph = std::get<InlineGraphConfig>(graph);
  return make_graph(inline_graph.n, inline_graph.edges);
}

namespace {

std::size_t game_strategies(const GameConfig& game) {
  if (std::holds_alternative<PresetGame>(game.payoffs)) return 2;
  const auto& matrices = std::get<ExplicitGame>(game.payoffs).matrices;
  return matrices.empty() ? 0 : matrices.front().size();
}

}  // namespace

GameSpec build_game(const GameConfig& game, std::size_t n) {
  GameSpec spec;
  if (const auto* preset = std::get_if<PresetGame>(&game.payoffs)) {
    switch (preset->preset) {
      case GamePreset::Bistable:
        spec = GameSpec::uniform(n, bistable_matrix(preset->theta), game.model);
        break;
      case GamePreset::Prisoner:
        spec = GameSpec::uniform(n, prisoner_matrix(preset->theta), game.model);
        break;
      case GamePreset::Coexistence:
        spec = GameSpec::uniform(n, coexistence_matrix(), game.model);
        break;
    }
  } else {
    const auto& matrices = std::get<ExplicitGame>(game.payoffs).matrices;
    spec.model = game.model;
    spec.matrices = matrices.size() == 1 ? std::vector<PayoffMatrix>(n, matrices.front())
                                         : matrices;
  }
  spec.validate(n);
  return spec;
}

StateProfile build_initial(const InitialConfig& initial, std::size_t n, std::size_t m) {
  if (const auto* preset = std::get_if<PresetInitial>(&initial)) {
    return initial_condition(preset->preset, n, preset->q, m);
  }
  return StateProfile::from_rows(std::get<ExplicitInitial>(initial).vectors);
}

// ---------------------------------------------------------------------------
// Validation

void validate(const ScenarioConfig& cfg) {
  if (cfg.id.empty()) throw ValidationError("id must be a non-empty string");

  const std::size_t n = vertex_count(cfg.graph);
  if (const auto* star = std::get_if<StarGraphConfig>(&cfg.graph)) {
    if (star->kind != StarKind::WeightedAsymmetric && !star->heavy_edges.empty()) {
      throw ValidationError("graph.star.heavy_edges is only allowed for weighted_asymmetric");
    }
  }
  build_graph(cfg.graph);

  if (const auto* preset = std::get_if<PresetGame>(&cfg.game.payoffs)) {
    if (preset->preset == GamePreset::Bistable && !(preset->theta > 0.0)) {
      throw ValidationError("game.theta must be > 0 for bistable");
    }
    if (preset->preset == GamePreset::Prisoner && !(preset->theta > 1.0)) {
      throw ValidationError("game.theta must be > 1 for prisoner");
    }
    if (!std::isfinite(preset->theta)) throw ValidationError("game.theta must be finite");
  } else {
    const auto& matrices = std::get<ExplicitGame>(cfg.game.payoffs).matrices;
    if (matrices.size() != 1 && matrices.size() != n) {
      throw ValidationError("game.matrices has " + std::to_string(matrices.size()) +
                            " entries but graph.n is " + std::to_string(n));
    }
  }
  const std::size_t m = game_strategies(cfg.game);
  build_game(cfg.game, n);

  if (const auto* vectors = std::get_if<ExplicitInitial>(&cfg.initial)) {
    if (vectors->vectors.size() != n) {
      throw ValidationError("initial_condition.vectors has " +
                            std::to_string(vectors->vectors.size()) +
                            " entries but graph.n is " + std::to_string(n));
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (vectors->vectors[v].size() != m) {
        throw ValidationError("initial_condition.vectors[" + std::to_string(v + 1) + "] has " +
                              std::to_string(vectors->vectors[v].size()) +
                              " components but the game has " + std::to_string(m) +
                              " strategies");
      }
    }
  } else if (m != 2) {
    throw ValidationError("initial_condition.preset needs a 2-strategy game, game has " +
                          std::to_string(m) + "; give initial_condition.vectors");
  }
  build_initial(cfg.initial, n, m);

  cfg.run.integrator.validate();
  if (!(cfg.run.steady_eps > 0.0)) throw ValidationError("run.steady_eps must be positive");
  if (!(cfg.run.steady_window > 0.0) || cfg.run.steady_window > cfg.run.integrator.t_end) {
    throw ValidationError("run.steady_window must be positive and not exceed run.t_end");
  }

  for (std::size_t i = 0; i < cfg.outputs.size(); ++i) {
    if (cfg.outputs[i].path.empty()) {
      throw ValidationError("outputs[" + std::to_string(i) + "].path must not be empty");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (cfg.outputs[j].path == cfg.outputs[i].path) {
        throw ValidationError("outputs[" + std::to_string(j) + "] and outputs[" +
                              std::to_string(i) + "] share the path " + cfg.outputs[i].path);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void allow_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> keys) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::string valid;
      for (auto k : keys) valid += (valid.empty() ? "" : ", ") + std::string(k);
      throw ValidationError("unknown field " + where + "." + key + " (valid: " + valid + ")");
    }
  }
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError("missing field " + where + "." + key);
  return *it;
}

const json& require_object(const json& value, const std::string& where) {
  if (!value.is_object()) throw ValidationError(where + " must be an object");
  return value;
}

double as_number(const json& value, const std::string& where) {
  if (!value.is_number()) throw ValidationError(where + " must be a number");
  return value.get<double>();
}

std::size_t as_count(const json& value, const std::string& where) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    throw ValidationError(where + " must be a non-negative integer");
  }
  return value.get<std::size_t>();
}

std::size_t as_vertex(const json& value, const std::string& where) {
  if (!value.is_number_integer() || value.get<long long>() < 1) {
    throw ValidationError(where + " must be a 1-based vertex label");
  }
  return value.get<std::size_t>() - 1;
}

std::string as_string(const json& value, const std::string& where) {
  if (!value.is_string()) throw ValidationError(where + " must be a string");
  return value.get<std::string>();
}

const json& as_array(const json& value, const std::string& where) {
  if (!value.is_array()) throw ValidationError(where + " must be an array");
  return value;
}

std::vector<double> as_vector(const json& value, const std::string& where) {
  std::vector<double> out;
  const json& arr = as_array(value, where);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(as_number(arr[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

PayoffMatrix as_matrix(const json& value, const std::string& where) {
  std::vector<std::vector<double>> rows;
  const json& arr = as_array(value, where);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    rows.push_back(as_vector(arr[i], where + "[" + std::to_string(i) + "]"));
  }
  try {
    return PayoffMatrix::from_rows(rows);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

GraphConfig parse_graph(const json& node) {
  require_object(node, "graph");
  if (node.contains("star")) {
    allow_keys(node, "graph", {"star"});
    const json& star = require_object(node["star"], "graph.star");
    allow_keys(star, "graph.star", {"kind", "n", "heavy_weight", "heavy_edges"});
    StarGraphConfig cfg;
    cfg.kind = star_kind_from_string(as_string(require(star, "graph.star", "kind"), "graph.star.kind"));
    cfg.n = as_count(require(star, "graph.star", "n"), "graph.star.n");
    if (star.contains("heavy_weight")) {
      cfg.heavy_weight = as_number(star["heavy_weight"], "graph.star.heavy_weight");
    }
    if (star.contains("heavy_edges")) {
      const json& edges = as_array(star["heavy_edges"], "graph.star.heavy_edges");
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = "graph.star.heavy_edges[" + std::to_string(i) + "]";
        if (!edges[i].is_array() || edges[i].size() != 2) {
          throw ValidationError(where + " must be a pair of vertex labels");
        }
        cfg.heavy_edges.push_back({as_vertex(edges[i][0], where), as_vertex(edges[i][1], where)});
      }
    }
    return cfg;
  }
  allow_keys(node, "graph", {"n", "edges"});
  InlineGraphConfig cfg;
  cfg.n = as_count(require(node, "graph", "n"), "graph.n");
  const json& edges = as_array(require(node, "graph", "edges"), "graph.edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "graph.edges[" + std::to_string(i) + "]";
    if (!edges[i].is_array() || edges[i].size() != 3) {
      throw ValidationError(where + " must be [from, to, weight]");
    }
    cfg.edges.push_back({as_vertex(edges[i][0], where), as_vertex(edges[i][1], where),
                         as_number(edges[i][2], where)});
  }
  return cfg;
}

GameConfig parse_game(const json& node) {
  require_object(node, "game");
  allow_keys(node, "game", {"preset", "theta", "matrix", "matrices", "model"});
  GameConfig cfg;
  if (node.contains("model")) {
    cfg.model = payoff_model_from_string(as_string(node["model"], "game.model"));
  }
  const int sources = int(node.contains("preset")) + int(node.contains("matrix")) +
                      int(node.contains("matrices"));
  if (sources != 1) {
    throw ValidationError("game needs exactly one of game.preset, game.matrix, game.matrices");
  }
  if (node.contains("preset")) {
    PresetGame preset;
    preset.preset = game_preset_from_string(as_string(node["preset"], "game.preset"));
    if (preset.preset == GamePreset::Coexistence) {
      if (node.contains("theta")) throw ValidationError("game.theta is not used by coexistence");
    } else {
      preset.theta = as_number(require(node, "game", "theta"), "game.theta");
    }
    cfg.payoffs = preset;
    return cfg;
  }
  if (node.contains("theta")) throw ValidationError("game.theta needs game.preset");
  ExplicitGame game;
  if (node.contains("matrix")) {
    game.matrices.push_back(as_matrix(node["matrix"], "game.matrix"));
  } else {
    const json& arr = as_array(node["matrices"], "game.matrices");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      game.matrices.push_back(as_matrix(arr[i], "game.matrices[" + std::to_string(i) + "]"));
    }
    if (game.matrices.size() == 1) {
      throw ValidationError("game.matrices with a single entry: use game.matrix");
    }
  }
  cfg.payoffs = std::move(game);
  return cfg;
}

InitialConfig parse_initial(const json& node) {
  require_object(node, "initial_condition");
  allow_keys(node, "initial_condition", {"preset", "q", "vectors"});
  if (node.contains("preset") == node.contains("vectors")) {
    throw ValidationError(
        "initial_condition needs exactly one of initial_condition.preset, "
        "initial_condition.vectors");
  }
  if (node.contains("preset")) {
    PresetInitial cfg;
    cfg.preset =
        initial_preset_from_string(as_string(node["preset"], "initial_condition.preset"));
    if (node.contains("q")) cfg.q = as_number(node["q"], "initial_condition.q");
    return cfg;
  }
  if (node.contains("q")) throw ValidationError("initial_condition.q needs a preset");
  ExplicitInitial cfg;
  const json& arr = as_array(node["vectors"], "initial_condition.vectors");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    cfg.vectors.push_back(
        as_vector(arr[i], "initial_condition.vectors[" + std::to_string(i) + "]"));
  }
  return cfg;
}

RunConfig parse_run(const json& node) {
  require_object(node, "run");
  allow_keys(node, "run",
             {"dt", "t_end", "renormalize_every", "clamp_negatives", "sample_every",
              "steady_eps", "steady_window"});
  RunConfig cfg;
  auto& opts = cfg.integrator;
  if (node.contains("dt")) opts.dt = as_number(node["dt"], "run.dt");
  if (node.contains("t_end")) opts.t_end = as_number(node["t_end"], "run.t_end");
  if (node.contains("renormalize_every")) {
    opts.renormalize_every = as_count(node["renormalize_every"], "run.renormalize_every");
  }
  if (node.contains("clamp_negatives")) {
    if (!node["clamp_negatives"].is_boolean()) {
      throw ValidationError("run.clamp_negatives must be a boolean");
    }
    opts.clamp_negatives = node["clamp_negatives"].get<bool>();
  }
  if (node.contains("sample_every")) {
    opts.sample_every = as_count(node["sample_every"], "run.sample_every");
  }
  if (node.contains("steady_eps")) cfg.steady_eps = as_number(node["steady_eps"], "run.steady_eps");
  if (node.contains("steady_window")) {
    cfg.steady_window = as_number(node["steady_window"], "run.steady_window");
  }
  return cfg;
}

std::vector<OutputSpec> parse_outputs(const json& node) {
  std::vector<OutputSpec> out;
  const json& arr = as_array(node, "outputs");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "outputs[" + std::to_string(i) + "]";
    require_object(arr[i], where);
    allow_keys(arr[i], where, {"kind", "path"});
    out.push_back({output_kind_from_string(as_string(require(arr[i], where, "kind"), where + ".kind")),
                   as_string(require(arr[i], where, "path"), where + ".path")});
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json matrix_json(const PayoffMatrix& b) { return json(b.rows()); }

}  // namespace

ScenarioConfig parse_scenario_text(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << source << ":" << line << ":" << column << ": malformed JSON";
    const std::string detail = e.what();
    const auto colon = detail.rfind(": ");
    if (colon != std::string::npos) os << " (" << detail.substr(colon + 2) << ")";
    throw ParseError(os.str());
  }

  try {
    require_object(doc, "scenario");
    allow_keys(doc, "scenario",
               {"id", "description", "graph", "game", "initial_condition", "run", "outputs"});
    ScenarioConfig cfg;
    cfg.id = as_string(require(doc, "scenario", "id"), "id");
    if (doc.contains("description")) cfg.description = as_string(doc["description"], "description");
    cfg.graph = parse_graph(require(doc, "scenario", "graph"));
    cfg.game = parse_game(require(doc, "scenario", "game"));
    cfg.initial = parse_initial(require(doc, "scenario", "initial_condition"));
    if (doc.contains("run")) cfg.run = parse_run(doc["run"]);
    if (doc.contains("outputs")) cfg.outputs = parse_outputs(doc["outputs"]);
    validate(cfg);
    return cfg;
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json doc = json::object();
  doc["id"] = cfg.id;
  doc["description"] = cfg.description;

  if (const auto* star = std::get_if<StarGraphConfig>(&cfg.graph)) {
    json heavy = json::array();
    for (const VertexPair& e : star->heavy_edges) heavy.push_back({e.a + 1, e.b + 1});
    doc["graph"] = {{"star",
                     {{"kind", std::string(to_string(star->kind))},
                      {"n", star->n},
                      {"heavy_weight", star->heavy_weight},
                      {"heavy_edges", heavy}}}};
  } else {
    const auto& g = std::get<InlineGraphConfig>(cfg.graph);
    json edges = json::array();
    for (const Edge& e : g.edges) edges.push_back({e.from + 1, e.to + 1, e.weight});
    doc["graph"] = {{"n", g.n}, {"edges", edges}};
  }

  json game = json::object();
  if (const auto* preset = std::get_if<PresetGame>(&cfg.game.payoffs)) {
    game["preset"] = std::string(to_string(preset->preset));
    if (preset->preset != GamePreset::Coexistence) game["theta"] = preset->theta;
  } else {
    const auto& matrices = std::get<ExplicitGame>(cfg.game.payoffs).matrices;
    if (matrices.size() == 1) {
      game["matrix"] = matrix_json(matrices.front());
    } else {
      json arr = json::array();
      for (const auto& b : matrices) arr.push_back(matrix_json(b));
      game["matrices"] = arr;
    }
  }
  game["model"] = std::string(to_string(cfg.game.model));
  doc["game"] = game;

  if (const auto* preset = std::get_if<PresetInitial>(&cfg.initial)) {
    doc["initial_condition"] = {{"preset", std::string(to_string(preset->preset))},
                                {"q", preset->q}};
  } else {
    doc["initial_condition"] = {{"vectors", std::get<ExplicitInitial>(cfg.initial).vectors}};
  }

  const auto& opts = cfg.run.integrator;
  doc["run"] = {{"dt", opts.dt},
                {"t_end", opts.t_end},
                {"renormalize_every", opts.renormalize_every},
                {"clamp_negatives", opts.clamp_negatives},
                {"sample_every", opts.sample_every},
                {"steady_eps", cfg.run.steady_eps},
                {"steady_window", cfg.run.steady_window}};

  json outputs = json::array();
  for (const OutputSpec& o : cfg.outputs) {
    outputs.push_back({{"kind", std::string(to_string(o.kind))}, {"path", o.path}});
  }
  doc["outputs"] = outputs;
  return doc.dump(2) + "\n";
}

}  // namespace regraph
