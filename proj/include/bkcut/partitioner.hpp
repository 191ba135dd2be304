#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bkcut/balance.hpp"
#include "bkcut/descent.hpp"
#include "bkcut/embedding.hpp"
#include "bkcut/graph.hpp"
#include "bkcut/inner_lp.hpp"

namespace bkcut {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Deterministic sub-seed for the named stream `tag` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0);

// Stream tags.
inline constexpr std::uint64_t kStreamInit = 1;
inline constexpr std::uint64_t kStreamTieBreak = 2;
inline constexpr std::uint64_t kStreamLabels = 3;

struct Partition {
  std::vector<int> assignment;
  int k = 0;

  int num_vertices() const { return static_cast<int>(assignment.size()); }
  std::vector<int> sizes() const;
  int nonempty_clusters() const;
  // All k clusters nonempty.
  bool valid() const;
  VertexSet cluster(int l) const;
  Embedding indicators() const;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Sum over clusters of cut(C_l) / S(C_l); +inf for an invalid partition.
double bcut(const Graph& g, const BalanceFunction& bf, const Partition& p);

struct RoundedResult {
  Partition partition;
  // Some row had more than one maximal entry.
  bool weak_degenerate = false;
  // Some cluster is empty.
  bool strong_degenerate = false;
  double bcut = kInfinity;

  bool valid() const { return !strong_degenerate; }
};

// Row-wise argmax; entries within 1e-9 of the row maximum count as tied and
// are resolved with a generator seeded by `seed`.
RoundedResult round(const Graph& g, const BalanceFunction& bf, const Embedding& f, std::uint64_t seed);

struct VertexRanking {
  // b*_{l i} for vertex i of cluster l, indexed by vertex.
  std::vector<double> score;
  // Per cluster: members sorted by decreasing score, ties by vertex id.
  std::vector<std::vector<int>> order;
};

// Minimal increase of the balanced cut when a vertex leaves its cluster:
// b*_{li} = r(C_l \ {i}) + min_{s != l} [ r(C_s + i) + sum_{j != l, s} r(C_j) ],
// r(C) = cut(C) / S(C). A vertex whose removal would empty C_l scores +inf.
VertexRanking vertex_ordering(const Graph& g, const BalanceFunction& bf, const Partition& p);

// Membership set I with its labels L. Seeded (ground-truth) vertices are
// permanent and keep their given cluster.
struct LabelConstraintSet {
  std::vector<int> members;
  std::vector<LabelConstraint> labels;
  std::vector<LabelConstraint> seeds;
  long quota = 0;

  std::size_t size() const { return members.size(); }
};

// I = seeds + the top-`quota` vertices of every ranking. Non-seed labels come
// from `cluster_of`. Sets capped when some cluster has fewer than quota members.
LabelConstraintSet select_membership(const VertexRanking& ranking, long quota,
                                     const std::vector<int>& cluster_of,
                                     const std::vector<LabelConstraint>& seeds, bool* capped = nullptr);

struct GrowthResult {
  LabelConstraintSet lcs;
  Embedding f;
  bool capped = false;
};

// Doubles the membership set: quota p = max(2|I|, 1), I rebuilt from the
// rankings, labels from the row argmax of f_source (lowest column on ties),
// labeled rows of the returned embedding hard-set. Without rankings (no valid
// partition seen yet) column l contributes its p largest entries of f_source,
// labeled l.
GrowthResult grow_membership(const LabelConstraintSet& lcs, const VertexRanking* ranking,
                             const Embedding& f_source);

// Ground-truth seeding for transductive runs.
struct SeedMode {
  enum Kind { PerClass, Percent } kind = PerClass;
  // Labels per class (PerClass), capped at the class size.
  int count = 1;
  double percent = 0.0;
};
LabelConstraintSet transductive_seed(const std::vector<int>& truth, int k, SeedMode mode,
                                     std::uint64_t seed);

// n_random Dirichlet(1) rows followed by n_spectral spectral-clustering
// embeddings (0.95 * indicator + 0.05 / k). If the eigen-solver fails the
// spectral slots are filled with extra random embeddings and `log` is told.
struct Initialization {
  Embedding f;
  std::string kind;
};
std::vector<Initialization> initializations(const Graph& g, int k, int n_random, int n_spectral,
                                            std::uint64_t seed,
                                            const std::function<void(const std::string&)>& log = {});

// Spectral clustering labels: first k eigenvectors of the normalized
// Laplacian, rows normalized, best of `restarts` k-means runs.
std::vector<int> spectral_labels(const Graph& g, int k, std::uint64_t seed, int restarts = 10);

// F_0 = 1 on the complement of two_cut, F_l = 1/(k-1) on two_cut for l >= 1.
Embedding construct_degenerate_embedding(const Graph& g, int k, const VertexSet& two_cut);

// (k-1) cut(C)/S(C) + cut(C)/S(V \ C), the ratio sum of the construction above.
double degenerate_objective(const Graph& g, const BalanceFunction& bf, int k, const VertexSet& two_cut);

struct MembershipEvent {
  int iteration = 0;
  long quota = 0;
  std::size_t size = 0;
  bool capped = false;
  bool improved = false;
};

struct InitReport {
  int index = 0;
  std::string kind;
  // ok, infeasible, degenerate, numeric-failure, no-partition
  std::string status = "ok";
  std::string message;
  std::vector<double> gamma;
  std::vector<double> chi;
  std::vector<std::size_t> membership_sizes;
  std::vector<MembershipEvent> membership;
  std::vector<StepLog> steps;
  int weak_degenerate_events = 0;
  int strong_degenerate_events = 0;
  bool inexact_termination = false;
  std::optional<Partition> best;
  double best_bcut = kInfinity;
  double final_gamma = kInfinity;
  Embedding final_f;
  RoundedResult final_rounding;
};

struct SolveConfig {
  int n_random = 5;
  int n_spectral = 7;
  std::uint64_t seed = 0;
  DescentOptions descent;
  // Diagnostic: descend on the simplex-only relaxation (no membership, no
  // size constraints) and report the best continuous objective.
  bool simplex_only = false;
  int threads = 1;
  // Relative tolerance of the stopping test chi == gamma.
  double stop_tol = 1e-4;
  // Cap on outer iterations per initialization, over all membership phases.
  int max_total_outer = 2000;
  std::function<void(const std::string&)> log;
  // PDHG residual samples tagged with (initialization, outer iteration).
  // May be called from several threads at once.
  std::function<void(int, int, const ResidualSample&)> on_residual;
};

struct SolveReport {
  bool success = false;
  std::string failure;
  Partition best;
  double best_bcut = kInfinity;
  int best_init = -1;
  double best_gamma = kInfinity;
  Embedding best_embedding;
  RoundedResult best_rounding;
  std::vector<InitReport> inits;
};

// Runs the membership-constrained descent from one embedding.
InitReport run_initialization(const Graph& g, const BalanceFunction& bf, const Embedding& f0,
                              const LabelConstraintSet& seeds, const SolveConfig& config, int index);

SolveReport solve_from(const Graph& g, const BalanceFunction& bf, const std::vector<Initialization>& inits,
                       const SolveConfig& config, const LabelConstraintSet* seeds = nullptr);

SolveReport solve(const Graph& g, const BalanceFunction& bf, const SolveConfig& config,
                  const LabelConstraintSet* seeds = nullptr);

}  // namespace bkcut
