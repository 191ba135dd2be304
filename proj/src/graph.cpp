#include "bkcut/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "bkcut/error.hpp"

namespace bkcut {

namespace {

constexpr double kMinKeptWeight = 1e-12;

}  // namespace

VertexSet::VertexSet(std::vector<int> members, int n) : members_(std::move(members)), n_(n) {
  if (n < 0) throw InvalidInput("vertex set universe must be non-negative");
  std::sort(members_.begin(), members_.end());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 0 || members_[i] >= n)
      throw InvalidInput("vertex " + std::to_string(members_[i]) + " out of range");
    if (i > 0 && members_[i] == members_[i - 1])
      throw InvalidInput("duplicate vertex " + std::to_string(members_[i]));
  }
}

VertexSet VertexSet::from_mask(std::span<const char> mask) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) ids.push_back(static_cast<int>(i));
  return VertexSet(std::move(ids), static_cast<int>(mask.size()));
}

VertexSet VertexSet::all(int n) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return VertexSet(std::move(ids), n);
}

bool VertexSet::contains(int v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

std::vector<char> VertexSet::mask() const {
  std::vector<char> m(n_, 0);
  for (int v : members_) m[v] = 1;
  return m;
}

VertexSet VertexSet::complement() const {
  auto m = mask();
  for (auto& c : m) c = !c;
  return from_mask(m);
}

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n < 0) throw InvalidInput("vertex count must be non-negative");
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw InvalidInput("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                         ") out of range");
    if (e.u == e.v) throw InvalidInput("self-loop at vertex " + std::to_string(e.u));
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw InvalidInput("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                         ") has non-positive weight");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
      throw InvalidInput("duplicate edge (" + std::to_string(edges_[i].u) + ", " +
                         std::to_string(edges_[i].v) + ")");
  }

  degrees_.assign(n, 0.0);
  std::vector<int> counts(n, 0);
  for (const auto& e : edges_) {
    degrees_[e.u] += e.w;
    degrees_[e.v] += e.w;
    ++counts[e.u];
    ++counts[e.v];
    total_weight_ += e.w;
  }
  offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + counts[v];
  incidence_.resize(offsets_[n]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    incidence_[fill[e.u]++] = {static_cast<int>(i), e.v};
    incidence_[fill[e.v]++] = {static_cast<int>(i), e.u};
  }
}

Graph build_knn_graph(const Points& points, int k, double s) {
  const int n = static_cast<int>(points.size());
  if (k <= 0) throw InvalidInput("k must be positive");
  if (!(s > 0.0)) throw InvalidInput("scale s must be positive");
  if (n < k + 1)
    throw InvalidInput("need at least k+1 = " + std::to_string(k + 1) + " points, got " +
                       std::to_string(n));
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw InvalidInput("points have inconsistent dimension");

  std::vector<double> dist2(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = points[i][d] - points[j][d];
        acc += diff * diff;
      }
      dist2[static_cast<std::size_t>(i) * n + j] = acc;
      dist2[static_cast<std::size_t>(j) * n + i] = acc;
    }
  }

  // k nearest neighbors of each point; ties resolved toward the lower index.
  std::vector<char> adjacent(static_cast<std::size_t>(n) * n, 0);
  std::vector<double> sigma2(n, 0.0);
  std::vector<int> order(n - 1);
  for (int i = 0; i < n; ++i) {
    const double* row = &dist2[static_cast<std::size_t>(i) * n];
    int pos = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) order[pos++] = j;
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [row](int a, int b) {
      return row[a] != row[b] ? row[a] < row[b] : a < b;
    });
    for (int r = 0; r < k; ++r) {
      const int j = order[r];
      adjacent[static_cast<std::size_t>(i) * n + j] = 1;
      adjacent[static_cast<std::size_t>(j) * n + i] = 1;
    }
    sigma2[i] = row[order[k - 1]];
  }

  double floor2 = std::numeric_limits<double>::infinity();
  for (double v : sigma2)
    if (v > 0.0) floor2 = std::min(floor2, v);
  if (!std::isfinite(floor2)) floor2 = 1.0;  // every point coincides with its neighbors
  for (double& v : sigma2)
    if (v <= 0.0) v = floor2;

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!adjacent[static_cast<std::size_t>(i) * n + j]) continue;
      const double d2 = dist2[static_cast<std::size_t>(i) * n + j];
      const double w = std::exp(-s * d2 / std::min(sigma2[i], sigma2[j]));
      if (w >= kMinKeptWeight) edges.push_back({i, j, w});
    }
  }
  return Graph(n, std::move(edges));
}

double cut_value(const Graph& g, std::span<const char> mask) {
  if (static_cast<int>(mask.size()) != g.num_vertices())
    throw InvalidInput("vertex mask length does not match graph");
  double cut = 0.0;
  for (const auto& e : g.edges())
    if (mask[e.u] != mask[e.v]) cut += e.w;
  return cut;
}

double cut_value(const Graph& g, const VertexSet& a) {
  if (a.universe() != g.num_vertices()) throw InvalidInput("vertex set universe mismatch");
  const auto m = a.mask();
  return cut_value(g, std::span<const char>(m));
}

double total_variation(const Graph& g, std::span<const double> f) {
  if (static_cast<int>(f.size()) != g.num_vertices())
    throw InvalidInput("total_variation: vector length " + std::to_string(f.size()) +
                       " does not match vertex count " + std::to_string(g.num_vertices()));
  double tv = 0.0;
  for (const auto& e : g.edges()) tv += e.w * std::abs(f[e.u] - f[e.v]);
  return tv;
}

std::vector<VertexSet> connected_components(const Graph& g) {
  const int n = g.num_vertices();
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> groups;
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    if (label[root] >= 0) continue;
    const int id = static_cast<int>(groups.size());
    groups.emplace_back();
    label[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      groups[id].push_back(v);
      for (const auto& inc : g.incident(v)) {
        if (label[inc.other] < 0) {
          label[inc.other] = id;
          stack.push_back(inc.other);
        }
      }
    }
  }
  std::vector<VertexSet> out;
  out.reserve(groups.size());
  for (auto& grp : groups) out.emplace_back(std::move(grp), n);
  return out;
}

Graph read_edge_list(std::istream& in, int min_vertices) {
  std::vector<Edge> edges;
  int max_index = -1;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long u = 0, v = 0;
    double w = 0.0;
    if (!(row >> u >> v >> w))
      throw InvalidInput("line " + std::to_string(line_no) + ": expected 'i j w'");
    std::string trailing;
    if (row >> trailing)
      throw InvalidInput("line " + std::to_string(line_no) + ": unexpected token '" + trailing +
                         "'");
    if (u < 0 || v < 0 || u > std::numeric_limits<int>::max() / 2 ||
        v > std::numeric_limits<int>::max() / 2)
      throw InvalidInput("line " + std::to_string(line_no) + ": vertex index out of range");
    edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
    max_index = std::max<int>(max_index, static_cast<int>(std::max(u, v)));
  }
  try {
    return Graph(std::max(max_index + 1, min_vertices), std::move(edges));
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("edge list: ") + e.what());
  }
}

}  // namespace bkcut
