#include "bkcut/partitioner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <Eigen/Dense>

#include "bkcut/error.hpp"

namespace bkcut {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Partition by row argmax, lowest column on ties.
std::vector<int> argmax_rows(const Embedding& f) {
  std::vector<int> out(f.rows(), 0);
  for (int i = 0; i < f.rows(); ++i)
    for (int l = 1; l < f.cols(); ++l)
      if (f(i, l) > f(i, out[i])) out[i] = l;
  return out;
}

bool size_feasible(const BalanceFunction& bf, const Embedding& f) {
  for (int l = 0; l < f.cols(); ++l)
    if (bf.lovasz_value(f.column(l)) < bf.min_value()) return false;
  return true;
}

// Blends f toward the indicator of a valid partition derived from its argmax
// until every column satisfies S(F_l) >= m. Labeled rows stay hard-set.
std::optional<Embedding> make_size_feasible(const BalanceFunction& bf, Embedding f,
                                            const std::vector<LabelConstraint>& labels) {
  const int n = f.rows();
  const int k = f.cols();
  for (const auto& lc : labels) f.set_row_indicator(lc.vertex, lc.cluster);
  if (size_feasible(bf, f)) return f;
  if (n < k) return std::nullopt;

  std::vector<char> pinned(n, 0);
  for (const auto& lc : labels) pinned[lc.vertex] = 1;
  auto assign = argmax_rows(f);
  std::vector<int> sizes(k, 0);
  for (int c : assign) ++sizes[c];
  for (int l = 0; l < k; ++l) {
    if (sizes[l] > 0) continue;
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (pinned[i] || sizes[assign[i]] <= 1) continue;
      if (pick < 0 || f(i, l) > f(pick, l)) pick = i;
    }
    if (pick < 0) return std::nullopt;
    --sizes[assign[pick]];
    assign[pick] = l;
    ++sizes[l];
  }
  Partition p{assign, k};
  const Embedding ind = p.indicators();
  if (!size_feasible(bf, ind)) return std::nullopt;
  for (double t = 0.5; t > 1e-3; t *= 0.5) {
    Embedding mix(n, k);
    for (std::size_t j = 0; j < mix.data().size(); ++j)
      mix.data()[j] = t * f.data()[j] + (1.0 - t) * ind.data()[j];
    if (size_feasible(bf, mix)) return mix;
  }
  return ind;
}

Embedding random_simplex_rows(int n, int k, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Embedding f(n, k);
  std::vector<double> row(k);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (auto& x : row) sum += (x = expo(rng));
    for (int l = 0; l < k; ++l) f(i, l) = row[l] / sum;
  }
  return f;
}

// Lloyd iterations from k-means++ seeding; returns labels and inertia.
std::pair<std::vector<int>, double> kmeans_once(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<int> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  Eigen::VectorXd dist(n);
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      double best = kInfinity;
      for (int j = 0; j < c; ++j) best = std::min(best, (x.row(i) - centers.row(j)).squaredNorm());
      dist[i] = best;
    }
    const double total = dist.sum();
    int chosen = pick(rng);
    if (total > 0.0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (int i = 0; i < n; ++i) {
        r -= dist[i];
        if (r <= 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centers.row(c) = x.row(chosen);
  }

  std::vector<int> labels(n, -1);
  double inertia = 0.0;
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = kInfinity;
      for (int c = 0; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      inertia += bd;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    // Empty clusters take the point farthest from its center.
    std::vector<int> count(k, 0);
    for (int c : labels) ++count[c];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[labels[i]] <= 1) continue;
        const double d = (x.row(i) - centers.row(labels[i])).squaredNorm();
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      if (far < 0) break;
      --count[labels[far]];
      labels[far] = c;
      ++count[c];
      changed = true;
    }
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.row(labels[i]) += x.row(i);
    for (int c = 0; c < k; ++c)
      if (count[c] > 0) centers.row(c) /= count[c];
    if (!changed) break;
  }
  return {labels, inertia};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ (tag * 0xd1b54a32d192ed03ULL)) ^ index);
}

std::vector<int> Partition::sizes() const {
  std::vector<int> s(k, 0);
  for (int c : assignment) ++s[c];
  return s;
}

int Partition::nonempty_clusters() const {
  const auto s = sizes();
  return static_cast<int>(std::count_if(s.begin(), s.end(), [](int x) { return x > 0; }));
}

bool Partition::valid() const { return k > 0 && nonempty_clusters() == k; }

VertexSet Partition::cluster(int l) const {
  std::vector<int> members;
  for (int i = 0; i < num_vertices(); ++i)
    if (assignment[i] == l) members.push_back(i);
  return VertexSet(std::move(members), num_vertices());
}

Embedding Partition::indicators() const {
  Embedding f(num_vertices(), k);
  for (int i = 0; i < num_vertices(); ++i) f(i, assignment[i]) = 1.0;
  return f;
}

double bcut(const Graph& g, const BalanceFunction& bf, const Partition& p) {
  if (p.num_vertices() != g.num_vertices()) throw InvalidInput("bcut: partition size mismatch");
  if (!p.valid()) return kInfinity;
  double total = 0.0;
  std::vector<char> mask(p.num_vertices());
  for (int l = 0; l < p.k; ++l) {
    for (int i = 0; i < p.num_vertices(); ++i) mask[i] = static_cast<char>(p.assignment[i] == l);
    const double s = bf.set_value(std::span<const char>(mask));
    const double c = cut_value(g, std::span<const char>(mask));
    if (s <= 0.0) {
      if (c > 0.0) return kInfinity;
      continue;
    }
    total += c / s;
  }
  return total;
}

RoundedResult round(const Graph& g, const BalanceFunction& bf, const Embedding& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RoundedResult out;
  out.partition.k = f.cols();
  out.partition.assignment.resize(f.rows());
  std::vector<int> tied;
  for (int i = 0; i < f.rows(); ++i) {
    double best = f(i, 0);
    for (int l = 1; l < f.cols(); ++l) best = std::max(best, f(i, l));
    tied.clear();
    for (int l = 0; l < f.cols(); ++l)
      if (f(i, l) >= best - 1e-9) tied.push_back(l);
    if (tied.size() > 1) {
      out.weak_degenerate = true;
      out.partition.assignment[i] =
          tied[std::uniform_int_distribution<std::size_t>(0, tied.size() - 1)(rng)];
    } else {
      out.partition.assignment[i] = tied[0];
    }
  }
  out.strong_degenerate = !out.partition.valid();
  out.bcut = out.strong_degenerate ? kInfinity : bcut(g, bf, out.partition);
  return out;
}

VertexRanking vertex_ordering(const Graph& g, const BalanceFunction& bf, const Partition& p) {
  if (!p.valid()) throw InvalidInput("vertex_ordering needs a valid k-partition");
  const int n = g.num_vertices();
  const int k = p.k;
  const auto& a = p.assignment;

  // w_to[i * k + c]: weight from i to cluster c.
  std::vector<double> w_to(static_cast<std::size_t>(n) * k, 0.0);
  for (const auto& e : g.edges()) {
    w_to[static_cast<std::size_t>(e.u) * k + a[e.v]] += e.w;
    w_to[static_cast<std::size_t>(e.v) * k + a[e.u]] += e.w;
  }
  std::vector<double> cut(k, 0.0), mass(k, 0.0);
  std::vector<int> count(k, 0);
  for (int i = 0; i < n; ++i) {
    cut[a[i]] += g.degree(i) - w_to[static_cast<std::size_t>(i) * k + a[i]];
    mass[a[i]] += bf.vertex_mass(i);
    ++count[a[i]];
  }
  auto ratio = [&](double c, double s) { return s > 0.0 ? c / s : kInfinity; };
  std::vector<double> r(k);
  for (int l = 0; l < k; ++l) r[l] = ratio(cut[l], bf.value_of_mass(mass[l]));

  VertexRanking out;
  out.score.assign(n, kInfinity);
  out.order.assign(k, {});
  for (int i = 0; i < n; ++i) {
    const int l = a[i];
    out.order[l].push_back(i);
    if (count[l] <= 1) continue;
    const double d = g.degree(i);
    const double mi = bf.vertex_mass(i);
    const double* wi = &w_to[static_cast<std::size_t>(i) * k];
    const double donor = ratio(cut[l] - d + 2.0 * wi[l], bf.value_of_mass(mass[l] - mi));
    double best = kInfinity;
    for (int s = 0; s < k; ++s) {
      if (s == l) continue;
      double rest = 0.0;
      for (int j = 0; j < k; ++j)
        if (j != l && j != s) rest += r[j];
      const double receiver = ratio(cut[s] + d - 2.0 * wi[s], bf.value_of_mass(mass[s] + mi));
      best = std::min(best, receiver + rest);
    }
    out.score[i] = donor + best;
  }
  for (auto& ord : out.order)
    std::stable_sort(ord.begin(), ord.end(),
                     [&](int x, int y) { return out.score[x] > out.score[y]; });
  return out;
}

LabelConstraintSet select_membership(const VertexRanking& ranking, long quota,
                                     const std::vector<int>& cluster_of,
                                     const std::vector<LabelConstraint>& seeds, bool* capped) {
  const int n = static_cast<int>(cluster_of.size());
  LabelConstraintSet out;
  out.seeds = seeds;
  out.quota = quota;
  std::vector<int> label(n, -1);
  for (const auto& s : seeds) label[s.vertex] = s.cluster;
  bool cap = false;
  for (const auto& ord : ranking.order) {
    if (quota > static_cast<long>(ord.size())) cap = true;
    const long take = std::min<long>(quota, static_cast<long>(ord.size()));
    for (long j = 0; j < take; ++j) {
      const int v = ord[j];
      if (label[v] < 0) label[v] = cluster_of[v];
    }
  }
  for (int i = 0; i < n; ++i)
    if (label[i] >= 0) {
      out.members.push_back(i);
      out.labels.push_back({i, label[i]});
    }
  if (capped) *capped = cap;
  return out;
}

GrowthResult grow_membership(const LabelConstraintSet& lcs, const VertexRanking* ranking,
                             const Embedding& f_source) {
  const int n = f_source.rows();
  const int k = f_source.cols();
  const long quota = std::max<long>(2 * static_cast<long>(lcs.size()), 1);
  GrowthResult out;
  if (ranking != nullptr) {
    out.lcs = select_membership(*ranking, quota, argmax_rows(f_source), lcs.seeds, &out.capped);
  } else {
    std::vector<int> label(n, -1);
    for (const auto& s : lcs.seeds) label[s.vertex] = s.cluster;
    std::vector<int> idx(n);
    for (int l = 0; l < k; ++l) {
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int x, int y) { return f_source(x, l) > f_source(y, l); });
      long taken = 0;
      for (int v : idx) {
        if (taken >= quota) break;
        if (label[v] >= 0) continue;
        label[v] = l;
        ++taken;
      }
      if (taken < quota) out.capped = true;
    }
    out.lcs.seeds = lcs.seeds;
    out.lcs.quota = quota;
    for (int i = 0; i < n; ++i)
      if (label[i] >= 0) {
        out.lcs.members.push_back(i);
        out.lcs.labels.push_back({i, label[i]});
      }
  }
  out.f = f_source;
  for (const auto& lc : out.lcs.labels) out.f.set_row_indicator(lc.vertex, lc.cluster);
  return out;
}

LabelConstraintSet transductive_seed(const std::vector<int>& truth, int k, SeedMode mode,
                                     std::uint64_t seed) {
  const int n = static_cast<int>(truth.size());
  std::vector<std::vector<int>> by_class(k);
  for (int i = 0; i < n; ++i) {
    if (truth[i] < 0 || truth[i] >= k)
      throw InvalidInput("ground-truth class " + std::to_string(truth[i]) + " outside 0.." +
                         std::to_string(k - 1));
    by_class[truth[i]].push_back(i);
  }
  if (mode.kind == SeedMode::Percent && !(mode.percent > 0.0 && mode.percent <= 100.0))
    throw InvalidInput("label percentage must lie in (0, 100]");
  if (mode.kind == SeedMode::PerClass && mode.count < 1)
    throw InvalidInput("labels per class must be positive");
  std::mt19937_64 rng(derive_seed(seed, kStreamLabels));
  std::vector<int> label(n, -1);
  for (int c = 0; c < k; ++c) {
    auto members = by_class[c];
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);
    long count = mode.count;
    if (mode.kind == SeedMode::Percent)
      count = std::max(1L, std::lround(mode.percent / 100.0 * static_cast<double>(members.size())));
    count = std::min<long>(count, static_cast<long>(members.size()));
    for (long j = 0; j < count; ++j) label[members[j]] = c;
  }
  LabelConstraintSet out;
  for (int i = 0; i < n; ++i)
    if (label[i] >= 0) {
      out.members.push_back(i);
      out.labels.push_back({i, label[i]});
    }
  out.seeds = out.labels;
  return out;
}

std::vector<int> spectral_labels(const Graph& g, int k, std::uint64_t seed, int restarts) {
  const int n = g.num_vertices();
  if (k < 1 || k > n) throw InvalidInput("spectral_labels: invalid k");
  Eigen::VectorXd inv_sqrt(n);
  for (int i = 0; i < n; ++i) inv_sqrt[i] = g.degree(i) > 0.0 ? 1.0 / std::sqrt(g.degree(i)) : 0.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  for (const auto& e : g.edges()) {
    const double v = e.w * inv_sqrt[e.u] * inv_sqrt[e.v];
    lap(e.u, e.v) -= v;
    lap(e.v, e.u) -= v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw NumericFailure("eigen-solver did not converge", 0);
  Eigen::MatrixXd u = solver.eigenvectors().leftCols(k);
  for (int i = 0; i < n; ++i) {
    const double norm = u.row(i).norm();
    if (norm > 0.0) u.row(i) /= norm;
  }
  std::mt19937_64 rng(seed);
  std::vector<int> best;
  double best_inertia = kInfinity;
  for (int r = 0; r < restarts; ++r) {
    auto [labels, inertia] = kmeans_once(u, k, rng);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best = std::move(labels);
    }
  }
  return best;
}

std::vector<Initialization> initializations(const Graph& g, int k, int n_random, int n_spectral,
                                            std::uint64_t seed,
                                            const std::function<void(const std::string&)>& log) {
  const int n = g.num_vertices();
  std::vector<Initialization> out;
  for (int j = 0; j < n_random; ++j) {
    std::mt19937_64 rng(derive_seed(seed, kStreamInit, static_cast<std::uint64_t>(j)));
    out.push_back({random_simplex_rows(n, k, rng), "random"});
  }
  for (int j = 0; j < n_spectral; ++j) {
    const auto idx = static_cast<std::uint64_t>(n_random + j);
    try {
      const auto labels = spectral_labels(g, k, derive_seed(seed, kStreamInit, idx));
      Embedding f(n, k, 0.05 / k);
      for (int i = 0; i < n; ++i) f(i, labels[i]) += 0.95;
      out.push_back({std::move(f), "spectral"});
    } catch (const NumericFailure& e) {
      if (log) log(std::string("spectral initialization failed (") + e.what() + "), using random");
      std::mt19937_64 rng(derive_seed(seed, kStreamInit, idx));
      out.push_back({random_simplex_rows(n, k, rng), "random-fallback"});
    }
  }
  return out;
}

Embedding construct_degenerate_embedding(const Graph& g, int k, const VertexSet& two_cut) {
  const int n = g.num_vertices();
  if (k < 2) throw InvalidInput("degenerate construction needs k >= 2");
  if (two_cut.universe() != n || two_cut.empty() || static_cast<int>(two_cut.size()) == n)
    throw InvalidInput("degenerate construction needs a nonempty strict subset");
  Embedding f(n, k);
  for (int i = 0; i < n; ++i) {
    if (two_cut.contains(i)) {
      for (int l = 1; l < k; ++l) f(i, l) = 1.0 / (k - 1);
    } else {
      f(i, 0) = 1.0;
    }
  }
  return f;
}

double degenerate_objective(const Graph& g, const BalanceFunction& bf, int k, const VertexSet& two_cut) {
  const double c = cut_value(g, two_cut);
  return (k - 1) * c / bf.set_value(two_cut) + c / bf.set_value(two_cut.complement());
}

InitReport run_initialization(const Graph& g, const BalanceFunction& bf, const Embedding& f0,
                              const LabelConstraintSet& seeds, const SolveConfig& config, int index) {
  InitReport rep;
  rep.index = index;
  const auto tie_seed = [&](int t) {
    return derive_seed(config.seed, kStreamTieBreak,
                       (static_cast<std::uint64_t>(index) << 32) | static_cast<std::uint32_t>(t));
  };

  DescentOptions dopt = config.descent;
  if (config.on_residual)
    dopt.on_residual = [&config, index](int outer, const ResidualSample& s) {
      config.on_residual(index, outer, s);
    };

  auto start = make_size_feasible(bf, f0, seeds.seeds);
  if (!start) {
    rep.status = "infeasible";
    rep.message = "could not make the initial embedding satisfy S(F_l) >= m";
    rep.final_f = f0;
    return rep;
  }

  LabelConstraintSet lcs;
  lcs.seeds = seeds.seeds;
  lcs.members = seeds.members;
  lcs.labels = seeds.seeds;
  DescentState state;
  try {
    state = make_descent_state(g, bf, std::move(*start), lcs.labels);
    rep.gamma.push_back(state.gamma);
    std::optional<VertexRanking> ranking;
    double chi_best = kInfinity;
    int phase_steps = 0;
    for (int t = 0; t < config.max_total_outer; ++t) {
      const DescentState prev = state;
      StepResult step = outer_step(g, bf, state, dopt);
      rep.steps.push_back(step.log);
      if (step.log.inexact) rep.inexact_termination = true;
      ++phase_steps;

      const RoundedResult rr = round(g, bf, step.state.f, tie_seed(t));
      if (rr.weak_degenerate) ++rep.weak_degenerate_events;
      if (rr.strong_degenerate) ++rep.strong_degenerate_events;
      rep.chi.push_back(rr.bcut);

      MembershipEvent ev;
      ev.iteration = t;
      const bool improved = rr.valid() && rr.bcut < chi_best && phase_steps <= dopt.max_outer;
      if (improved) {
        chi_best = rr.bcut;
        rep.best = rr.partition;
        rep.best_bcut = rr.bcut;
        ranking = vertex_ordering(g, bf, rr.partition);
        const std::size_t before = lcs.size();
        lcs = select_membership(*ranking, lcs.quota, rr.partition.assignment, lcs.seeds, &ev.capped);
        if (lcs.size() != before) phase_steps = 0;
        DescentState next = make_descent_state(g, bf, step.state.f, lcs.labels);
        next.last_lp = std::move(step.state.last_lp);
        next.outer_iteration = step.state.outer_iteration;
        state = std::move(next);
        ev.improved = true;
      } else {
        GrowthResult gr = grow_membership(lcs, ranking ? &*ranking : nullptr, prev.f);
        lcs = std::move(gr.lcs);
        ev.capped = gr.capped;
        phase_steps = 0;
        DescentState next = make_descent_state(g, bf, std::move(gr.f), lcs.labels);
        next.last_lp = std::move(step.state.last_lp);
        next.outer_iteration = step.state.outer_iteration;
        state = std::move(next);
      }
      ev.quota = lcs.quota;
      ev.size = lcs.size();
      rep.membership.push_back(ev);
      rep.membership_sizes.push_back(lcs.size());
      rep.gamma.push_back(state.gamma);

      const bool chi_matches =
          std::isfinite(rr.bcut) &&
          std::abs(rr.bcut - state.gamma) <= config.stop_tol * std::max(rr.bcut, 1e-12);
      const bool gamma_same = std::abs(state.gamma - prev.gamma) <= 1e-12 * std::max(1.0, prev.gamma);
      if (chi_matches && gamma_same) break;
    }
  } catch (const DegenerateColumn& e) {
    rep.status = "degenerate";
    rep.message = e.what();
  } catch (const InfeasibleIterate& e) {
    rep.status = "infeasible";
    rep.message = e.what();
  } catch (const NumericFailure& e) {
    rep.status = "numeric-failure";
    rep.message = e.what();
  }
  if (rep.status == "ok" && !rep.best) rep.status = "no-partition";
  rep.final_f = state.f.rows() > 0 ? state.f : f0;
  rep.final_gamma = state.f.rows() > 0 ? state.gamma : kInfinity;
  rep.final_rounding = round(g, bf, rep.final_f, tie_seed(-1));
  return rep;
}

namespace {

InitReport run_simplex_only(const Graph& g, const BalanceFunction& bf, const Embedding& f0,
                            const LabelConstraintSet& seeds, const SolveConfig& config, int index) {
  InitReport rep;
  rep.index = index;
  DescentOptions opt = config.descent;
  opt.size_constraints = false;
  if (config.on_residual)
    opt.on_residual = [&config, index](int outer, const ResidualSample& s) {
      config.on_residual(index, outer, s);
    };
  try {
    DescentResult r = descent_loop(g, bf, f0, seeds.seeds, opt);
    rep.steps = r.steps;
    if (!r.steps.empty()) rep.gamma.push_back(r.steps.front().gamma_before);
    for (const auto& s : r.steps) {
      rep.gamma.push_back(s.gamma);
      if (s.inexact) rep.inexact_termination = true;
    }
    rep.final_f = r.state.f;
    rep.final_gamma = r.state.gamma;
  } catch (const DegenerateColumn& e) {
    rep.status = "degenerate";
    rep.message = e.what();
  } catch (const InfeasibleIterate& e) {
    rep.status = "infeasible";
    rep.message = e.what();
  } catch (const NumericFailure& e) {
    rep.status = "numeric-failure";
    rep.message = e.what();
  }
  if (rep.final_f.rows() == 0) rep.final_f = f0;
  rep.final_rounding = round(g, bf, rep.final_f,
                             derive_seed(config.seed, kStreamTieBreak,
                                         (static_cast<std::uint64_t>(index) << 32) | 0xffffffffULL));
  if (rep.final_rounding.weak_degenerate) ++rep.weak_degenerate_events;
  if (rep.final_rounding.strong_degenerate) ++rep.strong_degenerate_events;
  if (rep.final_rounding.valid()) {
    rep.best = rep.final_rounding.partition;
    rep.best_bcut = rep.final_rounding.bcut;
  }
  return rep;
}

}  // namespace

SolveReport solve_from(const Graph& g, const BalanceFunction& bf, const std::vector<Initialization>& inits,
                       const SolveConfig& config, const LabelConstraintSet* seeds) {
  const int k = bf.clusters();
  if (k < 2 || k > g.num_vertices()) throw InvalidInput("solve needs 2 <= k <= n");
  for (const auto& init : inits)
    if (init.f.rows() != g.num_vertices() || init.f.cols() != k)
      throw InvalidInput("initial embedding has the wrong shape");
  const LabelConstraintSet empty;
  const LabelConstraintSet& seed_set = seeds ? *seeds : empty;

  SolveReport report;
  report.inits.resize(inits.size());
  std::mutex log_mutex;
  SolveConfig cfg = config;
  if (config.log)
    cfg.log = [&](const std::string& msg) {
      std::lock_guard<std::mutex> lock(log_mutex);
      config.log(msg);
    };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < inits.size(); j = next++) {
      InitReport rep = cfg.simplex_only
                           ? run_simplex_only(g, bf, inits[j].f, seed_set, cfg, static_cast<int>(j))
                           : run_initialization(g, bf, inits[j].f, seed_set, cfg, static_cast<int>(j));
      rep.kind = inits[j].kind;
      if (cfg.log)
        cfg.log("init " + std::to_string(j) + " (" + rep.kind + "): status " + rep.status +
                ", best bcut " + std::to_string(rep.best_bcut) + ", final gamma " +
                std::to_string(rep.final_gamma));
      report.inits[j] = std::move(rep);
    }
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(inits.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Deterministic reduction in initialization order.
  for (const auto& rep : report.inits) {
    if (cfg.simplex_only) {
      if (rep.final_gamma < report.best_gamma) {
        report.best_gamma = rep.final_gamma;
        report.best_init = rep.index;
      }
    } else if (rep.best && rep.best_bcut < report.best_bcut) {
      report.best_bcut = rep.best_bcut;
      report.best_init = rep.index;
    }
  }
  if (report.best_init < 0) {
    report.failure = "no initialization produced a valid " + std::to_string(k) + "-partition";
    return report;
  }
  const auto& win = report.inits[report.best_init];
  report.best_embedding = win.final_f;
  report.best_gamma = win.final_gamma;
  report.best_rounding = win.final_rounding;
  if (cfg.simplex_only) {
    report.best = win.final_rounding.partition;
    report.best_bcut = win.final_rounding.bcut;
    report.success = true;
  } else {
    report.best = *win.best;
    report.success = true;
  }
  return report;
}

SolveReport solve(const Graph& g, const BalanceFunction& bf, const SolveConfig& config,
                  const LabelConstraintSet* seeds) {
  const auto inits = initializations(g, bf.clusters(), config.n_random, config.n_spectral, config.seed,
                                     config.log);
  return solve_from(g, bf, inits, config, seeds);
}

}  // namespace bkcut
