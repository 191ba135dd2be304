#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bkcut/balance.hpp"
#include "bkcut/embedding.hpp"
#include "bkcut/graph.hpp"

namespace bkcut {

// Hard assignment of a vertex to a cluster inside the inner problem.
struct LabelConstraint {
  int vertex;
  int cluster;

  friend bool operator==(const LabelConstraint&, const LabelConstraint&) = default;
};

// The convex inner problem linearized at the anchor F^t, written as an LP over
// (F, alpha, delta+, delta-):
//
//   min   sum_l delta+_l - delta-_l
//   s.t.  <w, alpha_l> <= lambda_l <s_l, F_l> + m delta+_l - M delta-_l   (descent)
//         sum_l F_il = 1                                                 (simplex)
//         F_{i j_i} = 1 for (i, j_i) in labels                           (label)
//         <s_l, F_l> >= m                                                (size)
//         -alpha_l,ij <= F_il - F_jl <= alpha_l,ij for every edge (i, j)  (edge)
//         F, alpha, delta+, delta- >= 0
struct LPProblem {
  const Graph* graph = nullptr;
  int k = 0;
  Embedding anchor;
  std::vector<double> lambda;
  std::vector<std::vector<double>> subgradients;
  std::vector<LabelConstraint> labels;
  double m = 0.0;
  double big_m = 0.0;
  bool size_constraints = true;

  int num_vertices() const { return graph->num_vertices(); }
  std::size_t num_edges() const { return graph->num_edges(); }
};

// Builds the LP at the anchor f_t. Throws InfeasibleIterate when a column has
// S(F_l) < m (or S(F_l) <= 0 when size constraints are off), InvalidInput on
// malformed labels.
LPProblem assemble(const Graph& g, const BalanceFunction& bf, const Embedding& f_t,
                   std::span<const LabelConstraint> labels, bool size_constraints = true);

// Diagonal step sizes: tau_j = 1 / sum_i |A_ij| and sigma_i = 1 / sum_j |A_ij|
// of the LP constraint matrix, in closed form.
struct Preconditioners {
  std::vector<double> tau_f;       // n*k, column-major like Embedding
  std::vector<double> tau_alpha;   // |E|, shared by every column
  std::vector<double> tau_dplus;   // k
  std::vector<double> tau_dminus;  // k
  std::vector<double> sigma_theta; // k
  double sigma_mu = 0.0;
  double sigma_zeta = 0.0;
  std::vector<double> sigma_nu;    // k
  double sigma_edge = 0.0;         // eta and xi
};

// explicit_labels keeps the label rows (and their zeta duals) in the operator;
// otherwise labeled rows are eliminated and contribute no rho term.
Preconditioners compute_preconditioners(const LPProblem& p, bool explicit_labels = false);

// All primal and dual PDHG variables. Edge-indexed blocks are column-major:
// entry (e, l) lives at l * |E| + e.
struct LPState {
  std::vector<double> f, alpha, dplus, dminus;
  std::vector<double> theta, mu, zeta, nu, eta, xi;
};

// Primal at the anchor with alpha_e = |F_u - F_v| and delta = 0; duals copied
// from `previous` when its dimensions match, zero otherwise. With
// keep_primal the primal block is copied as well (labeled rows re-imposed).
LPState start_state(const LPProblem& p, const LPState* previous = nullptr,
                    bool explicit_labels = false, bool keep_primal = false);

struct ResidualSample {
  long iteration;
  double primal_residual;
  double dual_residual;
  double violation;
  double objective;
};

struct PdhgOptions {
  double tol = 1e-6;
  long max_iter = 50000;
  bool explicit_labels = false;
  // Resume from the warm start's primal iterate instead of the anchor.
  bool keep_primal = false;
  // Called every log_every iterations when set.
  std::function<void(const ResidualSample&)> on_residual;
  long log_every = 100;
  // Called every monitor_every iterations with the current F (column-major,
  // n*k); returning true stops the solve early.
  std::function<bool(long, std::span<const double>)> monitor;
  long monitor_every = 100;
};

struct LPSolution {
  Embedding f;
  std::vector<double> dplus;
  std::vector<double> dminus;
  double objective = 0.0;
  // Infinity norm of the last primal step (preconditioned fixed-point residual).
  double primal_residual = 0.0;
  // Infinity norm of the last dual step.
  double dual_residual = 0.0;
  // Largest sigma-scaled constraint violation, per constraint group.
  double violation = 0.0;
  double descent_violation = 0.0;
  double simplex_violation = 0.0;
  double size_violation = 0.0;
  double edge_violation = 0.0;
  double label_violation = 0.0;
  long iterations = 0;
  bool converged = false;
  bool stopped_by_monitor = false;
  LPState state;
};

// Diagonally preconditioned primal-dual hybrid gradient on the LP above.
// Throws NumericFailure if an iterate becomes non-finite.
LPSolution pdhg_solve(const LPProblem& p, const LPState* warm_start, const PdhgOptions& options);

}  // namespace bkcut
