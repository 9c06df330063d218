#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace regraph {

/// A directed edge with a positive weight. Vertices are 0-indexed.
struct Edge {
  std::size_t from;
  std::size_t to;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite weighted directed graph without self-loops, stored as a dense
/// N x N weight matrix. Entry (v, w) is the weight vertex v attributes to
/// its game against w; zero means v earns nothing from w.
///
/// Immutable after construction.
class Graph {
 public:
  /// Edgeless graph on n >= 1 vertices.
  explicit Graph(std::size_t n);

  /// Builds from a row-major n x n matrix. Throws ValidationError on a
  /// negative entry, a non-zero diagonal, or a size mismatch.
  static Graph from_matrix(std::size_t n, std::vector<double> weights);

  std::size_t size() const noexcept { return n_; }

  double weight(std::size_t v, std::size_t w) const { return weights_[v * n_ + w]; }

  /// Row v of the weight matrix, i.e. the outgoing weights of v.
  std::span<const double> row(std::size_t v) const {
    return {weights_.data() + v * n_, n_};
  }

  /// d_v: total outgoing weight of v.
  double out_weight(std::size_t v) const { return out_weight_[v]; }

  std::span<const double> weights() const noexcept { return weights_; }

  bool symmetric() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Graph(std::size_t n, std::vector<double> weights);

  std::size_t n_;
  std::vector<double> weights_;
  std::vector<double> out_weight_;
};

struct NeighborhoodReport {
  std::vector<std::size_t> neighbors;      // a(v,w) > 0 or a(w,v) > 0
  std::vector<std::size_t> out_neighbors;  // a(v,w) > 0
  std::size_t degree = 0;
  std::size_t out_degree = 0;
  double weight_sum = 0.0;

  friend bool operator==(const NeighborhoodReport&, const NeighborhoodReport&) = default;
};

/// Graph with exactly the listed edges. Rejects self-loops, duplicate
/// directed edges, out-of-range endpoints and non-positive weights.
Graph make_graph(std::size_t n, std::span<const Edge> edges);

NeighborhoodReport neighborhood(const Graph& g, std::size_t v);

/// Applies the vertex relabeling v -> perm[v].
Graph relabel(const Graph& g, std::span<const std::size_t> perm);

enum class StarKind { Open, Closed, WeightedAsymmetric };

std::string_view to_string(StarKind kind);
StarKind star_kind_from_string(std::string_view name);

struct VertexPair {
  std::size_t a;
  std::size_t b;

  friend bool operator==(const VertexPair&, const VertexPair&) = default;
};

/// Star topologies on n >= 3 vertices, hub at vertex 0.
///
/// Open: hub linked to every peripheral. Closed: open star plus the
/// peripheral cycle 1-2-...-(n-1)-1. WeightedAsymmetric: closed star with
/// heavy_edges reweighted to heavy_weight in both directions. All edges
/// are symmetric and carry weight 1 unless reweighted.
Graph build_star(StarKind kind, std::size_t n, double heavy_weight = 1.0,
                 std::span<const VertexPair> heavy_edges = {});

}  // namespace regraph
