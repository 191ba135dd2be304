// Acceptance suite: one pass/fail line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bkcut/cli.hpp"
#include "bkcut/descent.hpp"
#include "bkcut/error.hpp"
#include "bkcut/inner_lp.hpp"
#include "bkcut/partitioner.hpp"
#include "json.hpp"
#include "oracles/brute_force.hpp"
#include "oracles/dense_lp.hpp"
#include "oracles/fixtures.hpp"
#include "oracles/inner_lp_matrix.hpp"
#include "oracles/lp_instances.hpp"

using namespace bkcut;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Embedding random_embedding(std::mt19937_64& rng, int n, int k) {
  std::exponential_distribution<double> expo(1.0);
  Embedding f(n, k);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int l = 0; l < k; ++l) sum += (f(i, l) = expo(rng));
    for (int l = 0; l < k; ++l) f(i, l) /= sum;
  }
  return f;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bkcut_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig dataset_config(const std::string& file, const fs::path& out) {
  ExperimentConfig c;
  c.input = fs::path(BKCUT_TEST_DATA) / file;
  c.label_column = true;
  c.k = 3;
  c.out_dir = out;
  return c;
}

// 1. Lovasz identities.
Outcome lovasz_identities() {
  std::mt19937_64 rng(101);
  long checks = 0, failures = 0;
  for (auto kind : kAllBalanceKinds) {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 29);
      const Graph g = oracle::random_graph(rng, n, 0.3, true);
      const int k = 2 + static_cast<int>(rng() % std::min(4, n - 1));
      BalanceFunction bf(kind, k, g);
      const auto mask = oracle::random_mask(rng, n);
      std::vector<double> ind(n);
      for (int i = 0; i < n; ++i) ind[i] = mask[i] ? 1.0 : 0.0;
      const double set_value = bf.set_value(std::span<const char>(mask));
      const double reference = oracle::balance_definition(kind, k, g, mask);
      if (bf.lovasz_value(ind) != set_value) ++failures;
      if (std::abs(set_value - reference) > 1e-12 * std::max(1.0, reference)) ++failures;

      const auto f = oracle::random_vector(rng, n);
      const auto h = oracle::random_vector(rng, n);
      const auto s = bf.subgradient(f);
      if (std::abs(dot(s, f) - bf.lovasz_value(f)) > 1e-10) ++failures;
      if (bf.lovasz_value(h) < dot(s, h) - 1e-10) ++failures;
      checks += 4;
    }
  }
  return {failures == 0, std::to_string(checks - failures) + "/" + std::to_string(checks) + " checks hold"};
}

// 2. PDHG against the dense simplex oracle.
Outcome pdhg_vs_oracle() {
  std::mt19937_64 rng(202);
  int compared = 0, bad = 0;
  double worst = 0.0;
  while (compared < 50) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const int k = 2 + static_cast<int>(rng() % 2);
    const Graph g = oracle::random_graph(rng, n, 0.5, true);
    const auto kind = kAllBalanceKinds[rng() % 6];
    BalanceFunction bf(kind, k, g);
    auto f = oracle::random_anchor(rng, bf, n, k);
    std::vector<LabelConstraint> labels;
    if (compared % 3 == 0) {
      // Labeled rows of the anchor are hard-set, as the solver does.
      labels.push_back({static_cast<int>(rng() % n), static_cast<int>(rng() % k)});
      f.set_row_indicator(labels[0].vertex, labels[0].cluster);
    }
    LPProblem p;
    try {
      p = assemble(g, bf, f, labels);
    } catch (const InfeasibleIterate&) {
      continue;  // hard-setting a row can push a column below m; draw again
    }
    const auto ref = oracle::solve_dense_lp(oracle::materialize(p).lp);
    if (ref.status != oracle::LPStatus::Optimal) {
      ++bad;
      ++compared;
      continue;
    }
    PdhgOptions opt;
    opt.tol = 1e-9;
    opt.max_iter = 2000000;
    const auto sol = pdhg_solve(p, nullptr, opt);
    const double err = std::abs(sol.objective - ref.objective);
    worst = std::max(worst, err);
    if (err > 1e-6) ++bad;
    ++compared;
  }
  return {bad == 0, std::to_string(compared - bad) + "/50 match, worst |diff| " + fmt("%.2e", worst)};
}

struct StepAudit {
  long steps = 0, increases = 0, bad_terminations = 0;
  void add(const StepLog& s, const DescentOptions& o) {
    ++steps;
    if (s.gamma > s.gamma_before + 10.0 * o.inner_tol) ++increases;
    if (!s.accepted && s.inner_objective < -o.eps_descent) ++bad_terminations;
  }
};

// 3. Monotone descent on the regression fixtures.
Outcome monotone_descent() {
  StepAudit audit;
  DescentOptions opt;
  std::mt19937_64 rng(303);

  const auto fx = oracle::three_gaussians(1);
  const Graph gauss = build_knn_graph(fx.points, 10, 1.0);
  for (auto kind : kAllBalanceKinds) {
    BalanceFunction bf(kind, 3, gauss);
    for (int r = 0; r < 3; ++r) {
      const auto res = descent_loop(gauss, bf, random_embedding(rng, gauss.num_vertices(), 3), {}, opt);
      for (const auto& s : res.steps) audit.add(s, opt);
    }
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = oracle::random_graph(rng, 20, 0.25, true);
    BalanceFunction bf(kAllBalanceKinds[trial % 6], 2 + trial % 3, g);
    try {
      const auto res = descent_loop(g, bf, random_embedding(rng, 20, 2 + trial % 3), {}, opt);
      for (const auto& s : res.steps) audit.add(s, opt);
    } catch (const DegenerateColumn&) {
    } catch (const InfeasibleIterate&) {
    }
  }

  // Full method runs (membership-constrained steps).
  SolveConfig sc;
  sc.seed = 3;
  for (auto kind : {BalanceKind::RatioCheegerAsym, BalanceKind::NormalizedCut}) {
    BalanceFunction bf(kind, 3, gauss);
    const auto rep = solve(gauss, bf, sc);
    for (const auto& init : rep.inits)
      for (const auto& s : init.steps) audit.add(s, sc.descent);
  }
  {
    Dataset iris = read_points_file(fs::path(BKCUT_TEST_DATA) / "iris.csv", true);
    standardize(iris.points);
    const Graph g = build_knn_graph(iris.points, 15, 1.0);
    BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
    SolveConfig small = sc;
    small.n_random = 1;
    small.n_spectral = 1;
    const auto rep = solve(g, bf, small);
    for (const auto& init : rep.inits)
      for (const auto& s : init.steps) audit.add(s, sc.descent);
  }
  return {audit.increases == 0 && audit.bad_terminations == 0,
          std::to_string(audit.steps) + " steps, " + std::to_string(audit.increases) + " increases, " +
              std::to_string(audit.bad_terminations) + " terminations with inner objective < -eps_descent"};
}

// 4. k = 2 exactness for the symmetric ratio Cheeger cut.
Outcome two_way_exactness() {
  std::mt19937_64 rng(404);
  int ok = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 7);
    const Graph g = oracle::random_graph(rng, n, 0.35, true);
    BalanceFunction bf(BalanceKind::RatioCheegerSym, 2, g);
    const auto best = oracle::best_ratio_cut(g, BalanceKind::RatioCheegerSym, 2, 1e-9);
    // The continuous optimum is global; the descent is local, so it is
    // approximated by a wider multistart on these tiny graphs.
    SolveConfig sc;
    sc.seed = static_cast<std::uint64_t>(trial);
    sc.n_random = 50;
    const auto rep = solve(g, bf, sc);
    double gamma = kInfinity;
    for (const auto& init : rep.inits) gamma = std::min(gamma, init.final_gamma);
    const double diff = std::abs(gamma - 2.0 * best.ratio);
    worst = std::max(worst, diff);
    bool recovered = false;
    if (rep.success) {
      std::vector<char> side(n);
      for (int i = 0; i < n; ++i) side[i] = static_cast<char>(rep.best.assignment[i] == 0);
      std::vector<char> other(n);
      for (int i = 0; i < n; ++i) other[i] = static_cast<char>(!side[i]);
      for (const auto& s : best.optimal_sets) recovered |= (s == side || s == other);
    }
    if (diff <= 1e-4 && recovered) ++ok;
  }
  return {ok == 20, std::to_string(ok) + "/20 graphs exact, worst |gamma - 2 h*| " + fmt("%.2e", worst)};
}

// 5. Degeneracy of the simplex-only relaxation on a dominating 2-cut.
Outcome degeneracy() {
  const auto fx = oracle::three_gaussians(1);
  const Graph g = build_knn_graph(fx.points, 10, 1.0);
  BalanceFunction bf(BalanceKind::RatioCheegerAsym, 3, g);
  const auto two = oracle::best_degenerate_two_cut(g, 3);

  SolveConfig sc;
  sc.seed = 5;
  sc.simplex_only = true;
  const auto diag = solve(g, bf, sc);
  const int nonempty = diag.best_rounding.partition.nonempty_clusters();
  // Relative slack for floating-point evaluation of two equal ratio sums.
  const bool degenerate = nonempty <= 2 && diag.best_gamma <= two.phi * (1.0 + 1e-9);

  sc.simplex_only = false;
  const auto full = solve(g, bf, sc);
  const double dist = full.success ? full.best_embedding.distance_to_indicator() : kInfinity;
  const bool recovered = full.success && full.best.valid() && dist <= 1e-3;

  std::string d = "simplex-only: " + std::to_string(nonempty) + " nonempty clusters, gamma " +
                  fmt("%.6g", diag.best_gamma) + " vs phi* " + fmt("%.6g", two.phi) + "; full: " +
                  (full.best.valid() ? "valid 3-partition" : "no valid partition") + ", distance to indicator " +
                  fmt("%.1e", dist);
  return {degenerate && recovered, d};
}

Outcome dataset_run(const std::string& file, double max_bcut, double min_err, double max_err, int labels_per_class) {
  const fs::path out = scratch(file + std::to_string(labels_per_class));
  auto cfg = dataset_config(file, out);
  cfg.labels_per_class = labels_per_class;
  std::ostringstream log;
  const RunResult r = run(cfg, log);
  if (!r.report.success) return {false, "solve failed: " + r.report.failure};
  const double err = r.error_percent.value_or(100.0);
  bool ok = r.report.best_bcut <= max_bcut && err >= min_err && err <= max_err && r.seconds < 600.0;
  std::string d = "BCut " + fmt("%.4f", r.report.best_bcut) + " (limit " + fmt("%.3f", max_bcut) + "), error " +
                  fmt("%.2f", err) + "% (window [" + fmt("%.0f", min_err) + ", " + fmt("%.0f", max_err) + "]), " +
                  fmt("%.0f", r.seconds) + " s";
  if (labels_per_class > 0) {
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    std::ifstream af(out / "assignment.tsv");
    const auto assign = read_assignment(af);
    int kept = 0, total = 0;
    for (const auto& pair : report["seed_labels"]) {
      ++total;
      kept += assign[pair[0].get<int>()] == pair[1].get<int>();
    }
    ok = ok && total > 0 && kept == total;
    d += ", seeds kept " + std::to_string(kept) + "/" + std::to_string(total);
  }
  return {ok, d};
}

// 9. b* ordering against exhaustive recomputation.
Outcome bstar_oracle() {
  std::mt19937_64 rng(909);
  long checked = 0, bad = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 9);
    const int k = 2 + static_cast<int>(rng() % 3);
    const Graph g = oracle::random_graph(rng, n, 0.5, true);
    const auto kind = kAllBalanceKinds[trial % 6];
    BalanceFunction bf(kind, k, g);
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) a[i] = i < k ? i : static_cast<int>(rng() % k);
    std::shuffle(a.begin(), a.end(), rng);
    const auto rk = vertex_ordering(g, bf, Partition{a, k});
    const auto want = oracle::bstar_definition(g, kind, k, a);
    for (int i = 0; i < n; ++i) {
      ++checked;
      const bool same = std::isinf(want[i]) ? std::isinf(rk.score[i])
                                            : std::abs(rk.score[i] - want[i]) <= 1e-12 * std::max(1.0, std::abs(want[i]));
      if (!same) ++bad;
    }
    for (int l = 0; l < k; ++l)
      for (std::size_t j = 1; j < rk.order[l].size(); ++j) {
        const double prev = want[rk.order[l][j - 1]];
        const double cur = want[rk.order[l][j]];
        if (!(std::isinf(prev) || prev >= cur - 1e-12 * std::max(1.0, std::abs(cur)))) ++bad;
      }
  }
  return {bad == 0, std::to_string(checked) + " scores checked, " + std::to_string(bad) + " mismatches"};
}

// 10. Determinism of the assignment file.
Outcome determinism() {
  std::string first;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path out = scratch("determinism" + std::to_string(rep));
    auto cfg = dataset_config("iris.csv", out);
    cfg.n_random = 2;
    cfg.n_spectral = 1;
    cfg.seed = 77;
    std::ostringstream log;
    run(cfg, log);
    const std::string bytes = slurp(out / "assignment.tsv");
    if (rep == 0) {
      first = bytes;
    } else if (bytes != first || bytes.empty()) {
      return {false, "assignment files differ"};
    }
  }
  return {true, "two runs byte-identical (" + std::to_string(first.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> all{
      {1, "Lovasz identities", lovasz_identities},
      {2, "PDHG vs reference LP solver", pdhg_vs_oracle},
      {3, "monotone descent", monotone_descent},
      {4, "k=2 exactness", two_way_exactness},
      {5, "degeneracy reproduction", degeneracy},
      {6, "Iris end-to-end", [] { return dataset_run("iris.csv", 1.525, 21.0, 26.0, 0); }},
      {7, "wine end-to-end", [] { return dataset_run("wine.csv", 4.252, 0.0, 9.0, 0); }},
      {8, "wine with 1 label per class", [] { return dataset_run("wine.csv", kInfinity, 0.0, 10.0, 1); }},
      {9, "b* ordering oracle", bstar_oracle},
      {10, "determinism", determinism},
  };
  const std::vector<double> limit_seconds{10, 120, 600, 600, 300, 600, 600, 600, 600, 600};

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_seconds[c.id - 1]) {
      o.pass = false;
      o.detail += "; runtime over " + fmt("%.0f", limit_seconds[c.id - 1]) + " s";
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
