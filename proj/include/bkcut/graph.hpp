#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace bkcut {

// Undirected weighted edge, stored once with u < v.
struct Edge {
  int u;
  int v;
  double w;
};

// Sorted set of distinct vertex ids drawn from {0..n-1}.
class VertexSet {
 public:
  VertexSet() = default;
  // Sorts and validates; throws InvalidInput on duplicates or out-of-range ids.
  VertexSet(std::vector<int> members, int n);

  static VertexSet from_mask(std::span<const char> mask);
  static VertexSet all(int n);

  int universe() const { return n_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(int v) const;
  std::span<const int> members() const { return members_; }
  std::vector<char> mask() const;
  VertexSet complement() const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<int> members_;
  int n_ = 0;
};

// Immutable sparse undirected graph with positive weights.
class Graph {
 public:
  struct Incidence {
    int edge;
    int other;
  };

  Graph() = default;
  // Edges may be given in either orientation; they are canonicalized to u < v
  // and sorted. Throws InvalidInput on self-loops, duplicates, non-positive
  // weights or out-of-range endpoints.
  Graph(int n, std::vector<Edge> edges);

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t e) const { return edges_[e]; }

  double degree(int v) const { return degrees_[v]; }
  std::span<const double> degrees() const { return degrees_; }
  // Number of incident edges (unweighted degree).
  int neighbor_count(int v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const Incidence> incident(int v) const {
    return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
  }
  double total_weight() const { return total_weight_; }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
  std::vector<int> offsets_{0};
  std::vector<Incidence> incidence_;
  double total_weight_ = 0.0;
};

using Points = std::vector<std::vector<double>>;

// Symmetric k-NN graph with weights exp(-s |x-y|^2 / min(sigma_x^2, sigma_y^2)),
// sigma_x being the distance from x to its k-th nearest neighbor.
Graph build_knn_graph(const Points& points, int k, double s);

// cut(A, V \ A).
double cut_value(const Graph& g, const VertexSet& a);
double cut_value(const Graph& g, std::span<const char> mask);

// Sum over edges of w_ij |f_i - f_j|.
double total_variation(const Graph& g, std::span<const double> f);

std::vector<VertexSet> connected_components(const Graph& g);

// Reads "i j w" lines (0-based). Blank lines and '#' comments are skipped.
// The vertex count is max index + 1 unless min_vertices is larger.
Graph read_edge_list(std::istream& in, int min_vertices = 0);

}  // namespace bkcut
