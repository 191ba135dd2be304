#pragma once

// Random instances shared by unit and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "bkcut/graph.hpp"

namespace oracle {

// Erdos-Renyi style graph with edge probability p and weights in [0.1, 1].
// When connected is set, a random spanning tree is added first.
inline bkcut::Graph random_graph(std::mt19937_64& rng, int n, double p, bool connected) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
  std::vector<bkcut::Edge> edges;
  auto add = [&](int a, int b) {
    if (a == b || has[a][b]) return;
    has[a][b] = has[b][a] = 1;
    edges.push_back({a, b, 0.1 + 0.9 * unit(rng)});
  };
  if (connected)
    for (int v = 1; v < n; ++v) add(v, std::uniform_int_distribution<int>(0, v - 1)(rng));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (unit(rng) < p) add(a, b);
  return bkcut::Graph(n, std::move(edges));
}

inline bkcut::Graph unit_triangle() { return bkcut::Graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }

inline bkcut::Graph two_triangles() {
  return bkcut::Graph(6, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0}});
}

inline std::vector<double> random_vector(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> f(n);
  for (auto& x : f) x = d(rng);
  return f;
}

inline std::vector<char> random_mask(std::mt19937_64& rng, int n) {
  std::vector<char> m(n);
  for (auto& b : m) b = static_cast<char>(rng() & 1u);
  return m;
}

// Three isotropic unit Gaussians in 10 dimensions, `per_cluster` points each.
// Cluster 0 sits far from clusters 1 and 2, so its 10-NN graph has a
// dominating 2-cut separating cluster 0 from the rest.
struct GaussianFixture {
  bkcut::Points points;
  std::vector<int> truth;
};

inline GaussianFixture three_gaussians(std::uint64_t seed, int per_cluster = 8) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double offset[3] = {40.0, 0.0, 8.0};
  GaussianFixture out;
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < per_cluster; ++j) {
      std::vector<double> x(10);
      for (auto& v : x) v = normal(rng);
      x[0] += offset[c];
      out.points.push_back(std::move(x));
      out.truth.push_back(c);
    }
  return out;
}

}  // namespace oracle
