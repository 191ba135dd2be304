#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "bkcut/error.hpp"
#include "bkcut/partitioner.hpp"
#include "doctest.h"
#include "oracles/brute_force.hpp"
#include "oracles/fixtures.hpp"

using namespace bkcut;

namespace {

std::vector<int> random_partition(std::mt19937_64& rng, int n, int k) {
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) a[i] = i < k ? i : static_cast<int>(rng() % static_cast<unsigned>(k));
  std::shuffle(a.begin(), a.end(), rng);
  return a;
}

// Same partition up to relabeling of the clusters.
bool same_clustering(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [x, fresh_x] = ab.emplace(a[i], b[i]);
    auto [y, fresh_y] = ba.emplace(b[i], a[i]);
    if (x->second != b[i] || y->second != a[i]) return false;
  }
  return true;
}

SolveConfig small_config(std::uint64_t seed) {
  SolveConfig c;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("derive_seed separates streams and is stable") {
  CHECK(derive_seed(7, kStreamInit, 0) == derive_seed(7, kStreamInit, 0));
  CHECK(derive_seed(7, kStreamInit, 0) != derive_seed(7, kStreamTieBreak, 0));
  CHECK(derive_seed(7, kStreamInit, 0) != derive_seed(7, kStreamInit, 1));
  CHECK(derive_seed(7, kStreamInit, 0) != derive_seed(8, kStreamInit, 0));
}

TEST_CASE("round examples") {
  const Graph tri = oracle::unit_triangle();
  BalanceFunction bf(BalanceKind::RatioCut, 3, tri);

  Embedding f(3, 3);
  f(0, 0) = 0.2, f(0, 1) = 0.5, f(0, 2) = 0.3;
  f(1, 0) = 1.0;
  f(2, 2) = 1.0;
  const auto r = round(tri, bf, f, 1);
  CHECK(r.partition.assignment == std::vector<int>{1, 0, 2});
  CHECK_FALSE(r.weak_degenerate);
  CHECK_FALSE(r.strong_degenerate);
  CHECK(r.bcut == doctest::Approx(6.0));

  const Partition p{{0, 1, 2}, 3};
  const auto back = round(tri, bf, p.indicators(), 9);
  CHECK(back.partition == p);
  CHECK_FALSE(back.weak_degenerate);

  // Degenerate construction: column 0 on one triangle, the rest split.
  const Graph two = oracle::two_triangles();
  BalanceFunction bf2(BalanceKind::RatioCheegerAsym, 3, two);
  const auto deg = construct_degenerate_embedding(two, 3, VertexSet({3, 4, 5}, 6));
  const auto rd = round(two, bf2, deg, 4);
  CHECK(rd.weak_degenerate);
  CHECK(rd.strong_degenerate == (rd.partition.nonempty_clusters() < 3));
}

TEST_CASE("round with an all-zero column is strongly degenerate") {
  const Graph g = oracle::two_triangles();
  BalanceFunction bf(BalanceKind::RatioCut, 3, g);
  Embedding f(6, 3);
  for (int i = 0; i < 6; ++i) f(i, i < 3 ? 0 : 1) = 1.0;
  const auto r = round(g, bf, f, 0);
  CHECK(r.strong_degenerate);
  CHECK_FALSE(r.valid());
  CHECK(std::isinf(r.bcut));
}

TEST_CASE("round breaks ties reproducibly from the seed") {
  const Graph g = oracle::two_triangles();
  BalanceFunction bf(BalanceKind::RatioCut, 2, g);
  Embedding f(6, 2, 0.5);
  const auto a = round(g, bf, f, 42);
  const auto b = round(g, bf, f, 42);
  CHECK(a.weak_degenerate);
  CHECK(a.partition == b.partition);
  bool differs = false;
  for (std::uint64_t s = 0; s < 20 && !differs; ++s) differs = round(g, bf, f, s).partition != a.partition;
  CHECK(differs);
}

TEST_CASE("bcut matches the definition") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 7);
    const int k = 2 + static_cast<int>(rng() % 3);
    const Graph g = oracle::random_graph(rng, n, 0.4, true);
    const auto kind = kAllBalanceKinds[trial % std::size(kAllBalanceKinds)];
    BalanceFunction bf(kind, k, g);
    const auto a = random_partition(rng, n, k);
    const double want = oracle::bcut_definition(g, kind, k, a);
    const double got = bcut(g, bf, Partition{a, k});
    if (std::isinf(want)) {
      CHECK(std::isinf(got));
    } else {
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("b* ordering equals exhaustive recomputation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 9);
    const int k = 2 + static_cast<int>(rng() % 3);
    const Graph g = oracle::random_graph(rng, n, 0.5, true);
    const auto kind = kAllBalanceKinds[trial % std::size(kAllBalanceKinds)];
    BalanceFunction bf(kind, k, g);
    const auto a = random_partition(rng, n, k);
    const auto rk = vertex_ordering(g, bf, Partition{a, k});
    const auto want = oracle::bstar_definition(g, kind, k, a);
    for (int i = 0; i < n; ++i) {
      if (std::isinf(want[i])) {
        CHECK(std::isinf(rk.score[i]));
      } else {
        CHECK(std::abs(rk.score[i] - want[i]) <= 1e-12 * std::max(1.0, std::abs(want[i])));
      }
    }
    for (int l = 0; l < k; ++l) {
      std::vector<int> members;
      for (int i = 0; i < n; ++i)
        if (a[i] == l) members.push_back(i);
      std::vector<int> sorted = rk.order[l];
      std::sort(sorted.begin(), sorted.end());
      CHECK(sorted == members);
      for (std::size_t j = 1; j < rk.order[l].size(); ++j) {
        const double prev = want[rk.order[l][j - 1]];
        const double cur = want[rk.order[l][j]];
        CHECK((prev >= cur - 1e-12 * std::max(1.0, std::abs(cur)) || std::isinf(prev)));
      }
    }
  }
}

TEST_CASE("b* is identical for symmetric vertices") {
  // 4-cycle split into two adjacent pairs: all vertices are equivalent.
  const Graph cycle(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
  BalanceFunction bf(BalanceKind::RatioCut, 2, cycle);
  const auto rk = vertex_ordering(cycle, bf, Partition{{0, 0, 1, 1}, 2});
  for (int i = 1; i < 4; ++i) CHECK(rk.score[i] == rk.score[0]);
  CHECK(rk.order[0] == std::vector<int>{0, 1});
  CHECK_THROWS_AS(vertex_ordering(cycle, bf, Partition{{0, 0, 0, 0}, 2}), InvalidInput);
}

TEST_CASE("membership growth follows p = max(2|I|, 1)") {
  const auto fx = oracle::three_gaussians(1);
  const Graph g = build_knn_graph(fx.points, 10, 1.0);
  BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
  const Partition p{fx.truth, 3};
  const auto rk = vertex_ordering(g, bf, p);
  const Embedding f = p.indicators();

  LabelConstraintSet lcs;
  auto g1 = grow_membership(lcs, &rk, f);
  CHECK(g1.lcs.quota == 1);
  CHECK(g1.lcs.size() == 3);
  CHECK_FALSE(g1.capped);
  std::set<int> clusters;
  for (const auto& lc : g1.lcs.labels) clusters.insert(lc.cluster);
  CHECK(clusters.size() == 3);

  auto g2 = grow_membership(g1.lcs, &rk, f);
  CHECK(g2.lcs.quota == 6);
  CHECK(g2.lcs.size() == 18);
  auto g3 = grow_membership(g2.lcs, &rk, f);
  CHECK(g3.lcs.quota == 36);
  CHECK(g3.capped);
  CHECK(g3.lcs.size() == 24);

  // Monotone I, labels fixed, labeled rows hard-set.
  for (const auto* pair : {&g1, &g2}) {
    const auto& next = pair == &g1 ? g2 : g3;
    for (const auto& lc : pair->lcs.labels)
      CHECK(std::find(next.lcs.labels.begin(), next.lcs.labels.end(), lc) != next.lcs.labels.end());
  }
  for (const auto& lc : g2.lcs.labels) {
    CHECK(g2.f(lc.vertex, lc.cluster) == 1.0);
    CHECK(lc.cluster == fx.truth[lc.vertex]);
  }
}

TEST_CASE("growth without rankings takes the largest column entries") {
  Embedding f(4, 2);
  const double col0[] = {0.9, 0.6, 0.2, 0.1};
  for (int i = 0; i < 4; ++i) f(i, 0) = col0[i], f(i, 1) = 1.0 - col0[i];
  const auto gr = grow_membership(LabelConstraintSet{}, nullptr, f);
  REQUIRE(gr.lcs.labels.size() == 2);
  CHECK(gr.lcs.labels[0] == LabelConstraint{0, 0});
  CHECK(gr.lcs.labels[1] == LabelConstraint{3, 1});
  CHECK(gr.f(0, 0) == 1.0);
  CHECK(gr.f(3, 1) == 1.0);
}

TEST_CASE("seeded labels survive selection and growth") {
  const auto fx = oracle::three_gaussians(1);
  const Graph g = build_knn_graph(fx.points, 10, 1.0);
  BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
  // Seed vertex 0 into a cluster that disagrees with the ranking partition.
  const std::vector<LabelConstraint> seeds{{0, 2}};
  const auto rk = vertex_ordering(g, bf, Partition{fx.truth, 3});
  const auto sel = select_membership(rk, 4, fx.truth, seeds);
  CHECK(std::find(sel.labels.begin(), sel.labels.end(), LabelConstraint{0, 2}) != sel.labels.end());
  const auto gr = grow_membership(sel, &rk, Partition{fx.truth, 3}.indicators());
  CHECK(std::find(gr.lcs.labels.begin(), gr.lcs.labels.end(), LabelConstraint{0, 2}) != gr.lcs.labels.end());
  CHECK(gr.f(0, 2) == 1.0);
}

TEST_CASE("transductive seeding") {
  std::vector<int> truth;
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 50; ++j) truth.push_back(c);
  const auto one = transductive_seed(truth, 3, {}, 5);
  CHECK(transductive_seed(truth, 3, {SeedMode::PerClass, 4, 0.0}, 5).labels.size() == 12);
  CHECK(one.labels.size() == 3);
  for (const auto& lc : one.labels) CHECK(truth[lc.vertex] == lc.cluster);
  CHECK(one.seeds == one.labels);

  const auto ten = transductive_seed(truth, 3, {SeedMode::Percent, 1, 10.0}, 5);
  CHECK(ten.labels.size() == 15);
  CHECK(transductive_seed(truth, 3, {SeedMode::Percent, 1, 10.0}, 5).labels == ten.labels);

  // 0.5% of 50 rounds to zero and is promoted to one per class.
  CHECK(transductive_seed(truth, 3, {SeedMode::Percent, 1, 0.5}, 5).labels.size() == 3);
  CHECK_THROWS_AS(transductive_seed(truth, 2, {}, 5), InvalidInput);
}

TEST_CASE("initializations are row-stochastic and deterministic") {
  const auto fx = oracle::three_gaussians(3);
  const Graph g = build_knn_graph(fx.points, 10, 1.0);
  const auto a = initializations(g, 3, 2, 2, 99);
  const auto b = initializations(g, 3, 2, 2, 99);
  REQUIRE(a.size() == 4);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].f == b[j].f);
    CHECK(a[j].f.simplex_error() <= 1e-12);
  }
  CHECK(a[0].kind == "random");
  CHECK(a[3].kind == "spectral");
  CHECK_FALSE(a[0].f == a[1].f);
}

TEST_CASE("spectral initialization recovers connected components") {
  const Graph g = oracle::two_triangles();
  const auto labels = spectral_labels(g, 2, 1);
  CHECK(same_clustering(labels, {0, 0, 0, 1, 1, 1}));
  const auto inits = initializations(g, 2, 0, 1, 1);
  REQUIRE(inits.size() == 1);
  for (int i = 0; i < 6; ++i) {
    const int l = labels[i];
    CHECK(inits[0].f(i, l) == doctest::Approx(0.95 + 0.05 / 2));
  }
}

TEST_CASE("degenerate construction attains the closed-form two-cut objective") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 6);
    const int k = 3 + static_cast<int>(rng() % 2);
    const Graph g = oracle::random_graph(rng, n, 0.5, true);
    BalanceFunction bf(BalanceKind::RatioCheegerAsym, k, g);
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (i % 3 == 0) members.push_back(i);
    const VertexSet c(members, n);
    const Embedding f = construct_degenerate_embedding(g, k, c);
    CHECK(ratio_sum(g, bf, f) == doctest::Approx(degenerate_objective(g, bf, k, c)).epsilon(1e-12));
    // Every row of C ties across columns 1..k-1. Any consistent tie rule
    // (here: lowest column) leaves k-2 clusters empty; random tie-breaking
    // only guarantees the weak flag.
    CHECK(round(g, bf, f, 3).weak_degenerate);
    std::vector<int> lowest(n);
    for (int i = 0; i < n; ++i) {
      lowest[i] = 0;
      for (int l = 1; l < k; ++l)
        if (f(i, l) > f(i, lowest[i])) lowest[i] = l;
    }
    CHECK(Partition{lowest, k}.nonempty_clusters() == 2);
  }
  const Graph two = oracle::two_triangles();
  BalanceFunction sym(BalanceKind::RatioCheegerSym, 3, two);
  CHECK(degenerate_objective(two, sym, 3, VertexSet({0, 1, 2}, 6)) == 0.0);
  CHECK_THROWS_AS(construct_degenerate_embedding(two, 3, VertexSet({}, 6)), InvalidInput);
}

TEST_CASE("solve splits a graph with k components into the components") {
  const Graph g(9, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0},
                    {6, 7, 1.0}, {7, 8, 1.0}, {6, 8, 1.0}});
  BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
  SolveConfig cfg = small_config(4);
  cfg.n_random = 2;
  cfg.n_spectral = 1;
  const auto rep = solve(g, bf, cfg);
  REQUIRE(rep.success);
  CHECK(rep.best_bcut == 0.0);
  CHECK(same_clustering(rep.best.assignment, {0, 0, 0, 1, 1, 1, 2, 2, 2}));
}

TEST_CASE("full method avoids the degenerate solution on the Gaussian fixture") {
  const auto fx = oracle::three_gaussians(1);
  const Graph g = build_knn_graph(fx.points, 10, 1.0);
  BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
  SolveConfig cfg = small_config(1);
  cfg.n_random = 2;
  cfg.n_spectral = 1;
  const auto rep = solve(g, bf, cfg);
  REQUIRE(rep.success);
  CHECK(rep.best.valid());
  CHECK(rep.best_embedding.distance_to_indicator() <= 1e-3);
  CHECK(rep.best_gamma == doctest::Approx(rep.best_bcut).epsilon(1e-4));

  // Every init's accepted best-cut sequence strictly decreases.
  for (const auto& init : rep.inits) {
    double last = kInfinity;
    for (std::size_t t = 0; t < init.membership.size(); ++t)
      if (init.membership[t].improved) {
        CHECK(init.chi[t] < last);
        last = init.chi[t];
      }
  }

  cfg.simplex_only = true;
  const auto diag = solve(g, bf, cfg);
  CHECK(diag.best_rounding.partition.nonempty_clusters() <= 2);
}

TEST_CASE("solve keeps seeded labels and is deterministic across thread counts") {
  const auto fx = oracle::three_gaussians(2);
  const Graph g = build_knn_graph(fx.points, 10, 1.0);
  BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
  const auto seeds = transductive_seed(fx.truth, 3, {}, 6);
  SolveConfig cfg = small_config(6);
  cfg.n_random = 2;
  cfg.n_spectral = 1;
  const auto a = solve(g, bf, cfg, &seeds);
  cfg.threads = 2;
  const auto b = solve(g, bf, cfg, &seeds);
  REQUIRE(a.success);
  CHECK(a.best == b.best);
  CHECK(a.best_bcut == b.best_bcut);
  for (const auto& lc : seeds.labels) CHECK(a.best.assignment[lc.vertex] == lc.cluster);
}

TEST_CASE("solve without initializations reports failure") {
  const Graph g = oracle::two_triangles();
  BalanceFunction bf(BalanceKind::RatioCut, 2, g);
  SolveConfig cfg;
  cfg.n_random = 0;
  cfg.n_spectral = 0;
  const auto rep = solve(g, bf, cfg);
  CHECK_FALSE(rep.success);
  CHECK_FALSE(rep.failure.empty());
  BalanceFunction too_many(BalanceKind::RatioCut, 7, Graph(6, {{0, 1, 1.0}}));
  CHECK_THROWS_AS(solve(Graph(6, {{0, 1, 1.0}}), too_many, cfg), InvalidInput);
}
