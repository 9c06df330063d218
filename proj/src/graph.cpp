#include "regraph/graph.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "regraph/error.hpp"

namespace regraph {

namespace {

std::vector<double> row_sums(std::size_t n, const std::vector<double>& weights) {
  std::vector<double> sums(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = 0; w < n; ++w) sums[v] += weights[v * n + w];
  }
  return sums;
}

}  // namespace

Graph::Graph(std::size_t n) : Graph(n, std::vector<double>(n * n, 0.0)) {}

Graph::Graph(std::size_t n, std::vector<double> weights)
    : n_(n), weights_(std::move(weights)), out_weight_(row_sums(n_, weights_)) {
  if (n_ == 0) throw ValidationError("graph must have at least one vertex");
}

Graph Graph::from_matrix(std::size_t n, std::vector<double> weights) {
  if (weights.size() != n * n) {
    std::ostringstream os;
    os << "weight matrix has " << weights.size() << " entries, expected " << n * n;
    throw ValidationError(os.str());
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = 0; w < n; ++w) {
      const double a = weights[v * n + w];
      if (!std::isfinite(a) || a < 0.0) {
        throw ValidationError("weight (" + std::to_string(v) + "," + std::to_string(w) +
                              ") must be finite and non-negative");
      }
      if (v == w && a != 0.0) {
        throw ValidationError("self-loop on vertex " + std::to_string(v));
      }
    }
  }
  return Graph(n, std::move(weights));
}

bool Graph::symmetric() const {
  for (std::size_t v = 0; v < n_; ++v) {
    for (std::size_t w = v + 1; w < n_; ++w) {
      if (weight(v, w) != weight(w, v)) return false;
    }
  }
  return true;
}

Graph make_graph(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw ValidationError("graph must have at least one vertex");
  std::vector<double> weights(n * n, 0.0);
  for (const Edge& e : edges) {
    if (e.from >= n || e.to >= n) {
      std::ostringstream os;
      os << "edge (" << e.from << "," << e.to << ") out of range for " << n << " vertices";
      throw ValidationError(os.str());
    }
    if (e.from == e.to) throw ValidationError("self-loop on vertex " + std::to_string(e.from));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw ValidationError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                            ") needs a positive weight");
    }
    double& slot = weights[e.from * n + e.to];
    if (slot != 0.0) {
      throw ValidationError("duplicate edge (" + std::to_string(e.from) + "," +
                            std::to_string(e.to) + ")");
    }
    slot = e.weight;
  }
  return Graph::from_matrix(n, std::move(weights));
}

NeighborhoodReport neighborhood(const Graph& g, std::size_t v) {
  if (v >= g.size()) {
    throw ValidationError("vertex " + std::to_string(v) + " out of range");
  }
  NeighborhoodReport r;
  for (std::size_t w = 0; w < g.size(); ++w) {
    const bool out = g.weight(v, w) > 0.0;
    if (out) r.out_neighbors.push_back(w);
    if (out || g.weight(w, v) > 0.0) r.neighbors.push_back(w);
  }
  r.degree = r.neighbors.size();
  r.out_degree = r.out_neighbors.size();
  r.weight_sum = g.out_weight(v);
  return r;
}

Graph relabel(const Graph& g, std::span<const std::size_t> perm) {
  const std::size_t n = g.size();
  if (perm.size() != n) throw ValidationError("permutation size does not match graph");
  std::vector<bool> seen(n, false);
  for (std::size_t p : perm) {
    if (p >= n || seen[p]) throw ValidationError("not a permutation");
    seen[p] = true;
  }
  std::vector<double> weights(n * n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = 0; w < n; ++w) weights[perm[v] * n + perm[w]] = g.weight(v, w);
  }
  return Graph::from_matrix(n, std::move(weights));
}

std::string_view to_string(StarKind kind) {
  switch (kind) {
    case StarKind::Open:
      return "open";
    case StarKind::Closed:
      return "closed";
    case StarKind::WeightedAsymmetric:
      return "weighted_asymmetric";
  }
  return "?";
}

StarKind star_kind_from_string(std::string_view name) {
  if (name == "open") return StarKind::Open;
  if (name == "closed") return StarKind::Closed;
  if (name == "weighted_asymmetric") return StarKind::WeightedAsymmetric;
  throw ValidationError("unknown star kind '" + std::string(name) +
                        "' (valid: open, closed, weighted_asymmetric)");
}

Graph build_star(StarKind kind, std::size_t n, double heavy_weight,
                 std::span<const VertexPair> heavy_edges) {
  if (n < 3) throw ValidationError("star needs at least 3 vertices");
  std::vector<double> weights(n * n, 0.0);
  auto link = [&](std::size_t a, std::size_t b, double w) {
    weights[a * n + b] = w;
    weights[b * n + a] = w;
  };
  for (std::size_t p = 1; p < n; ++p) link(0, p, 1.0);
  if (kind == StarKind::Open) return Graph::from_matrix(n, std::move(weights));

  for (std::size_t p = 1; p < n; ++p) link(p, p + 1 < n ? p + 1 : 1, 1.0);
  if (kind == StarKind::Closed) return Graph::from_matrix(n, std::move(weights));

  if (!(heavy_weight > 0.0) || !std::isfinite(heavy_weight)) {
    throw ValidationError("heavy_weight must be positive");
  }
  for (const VertexPair& e : heavy_edges) {
    if (e.a >= n || e.b >= n || e.a == e.b || weights[e.a * n + e.b] == 0.0) {
      throw ValidationError("heavy edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                            ") is not an edge of the closed star");
    }
    link(e.a, e.b, heavy_weight);
  }
  return Graph::from_matrix(n, std::move(weights));
}

}  // namespace regraph
