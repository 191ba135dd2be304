#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bkcut/balance.hpp"
#include "bkcut/embedding.hpp"
#include "bkcut/graph.hpp"
#include "bkcut/inner_lp.hpp"

namespace bkcut {

struct DescentOptions {
  double inner_tol = 1e-6;
  long inner_max_iter = 50000;
  // Relative decrease of gamma below which descent_loop stops.
  double eps = 1e-4;
  int max_outer = 100;
  bool size_constraints = true;
  // An inner optimum at or above -eps_descent means no descent direction.
  double eps_descent = 1e-6;
  // How many times the inner tolerance may be divided by 10 within one step.
  int max_tightenings = 3;
  // Early exit: every monitor_every PDHG iterations the repaired iterate is
  // scored by its ratio sum; once one beats gamma^t and the best score has not
  // improved for `patience` iterations, the inner solve stops. 0 disables.
  long monitor_every = 50;
  long patience = 1000;
  // Optional per-PDHG-iteration residual sink (outer index, sample).
  std::function<void(int, const ResidualSample&)> on_residual;
  long residual_every = 100;
};

// The current iterate F^t with its ratios lambda_l = TV(F_l)/S(F_l) and
// subgradients of S at F_l.
struct DescentState {
  Embedding f;
  std::vector<LabelConstraint> labels;
  std::vector<double> lambda;
  std::vector<std::vector<double>> subgradients;
  double gamma = 0.0;
  int outer_iteration = 0;
  std::optional<LPState> last_lp;
};

// Hard-sets labeled rows, then evaluates lambda, s and gamma. Throws
// DegenerateColumn when some S(F_l) < m * 1e-8.
DescentState make_descent_state(const Graph& g, const BalanceFunction& bf, Embedding f,
                                std::vector<LabelConstraint> labels);

// Sum over columns of TV(F_l) / S(F_l).
double ratio_sum(const Graph& g, const BalanceFunction& bf, const Embedding& f);

struct StepLog {
  int outer = 0;
  double gamma_before = 0.0;
  double gamma = 0.0;
  std::vector<double> lambda;
  double inner_objective = 0.0;
  long inner_iterations = 0;
  bool inner_converged = false;
  double inner_tol = 0.0;
  bool accepted = false;
  bool early_exit = false;
  // Terminated although the inner objective was below -eps_descent (no
  // gamma-decreasing iterate found within the iteration and tightening budget).
  bool inexact = false;
};

enum class StepOutcome { Accepted, Terminated };

struct StepResult {
  StepOutcome outcome;
  DescentState state;
  StepLog log;
};

// One linearize-and-solve step. Accepted steps strictly decrease gamma;
// otherwise the state is returned unchanged (apart from the cached LP state)
// with outcome Terminated.
StepResult outer_step(const Graph& g, const BalanceFunction& bf, const DescentState& state,
                      const DescentOptions& options);

enum class StopReason { Terminated, SmallDecrease, MaxOuter };

struct DescentResult {
  DescentState state;
  std::vector<StepLog> steps;
  StopReason reason = StopReason::Terminated;
};

DescentResult descent_loop(const Graph& g, const BalanceFunction& bf, Embedding initial,
                           std::vector<LabelConstraint> labels, const DescentOptions& options);

}  // namespace bkcut
