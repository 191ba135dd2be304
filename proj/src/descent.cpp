#include "bkcut/descent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bkcut/error.hpp"

namespace bkcut {

namespace {

// Rows back onto the simplex, labeled rows to their indicator.
void repair(Embedding& f, const std::vector<LabelConstraint>& labels) {
  project_rows_to_simplex(f);
  for (const auto& lc : labels) f.set_row_indicator(lc.vertex, lc.cluster);
}

bool meets_size_bound(const BalanceFunction& bf, const Embedding& f) {
  for (int l = 0; l < f.cols(); ++l)
    if (bf.lovasz_value(f.column(l)) < bf.min_value() * (1.0 - 1e-6)) return false;
  return true;
}

}  // namespace

double ratio_sum(const Graph& g, const BalanceFunction& bf, const Embedding& f) {
  double gamma = 0.0;
  for (int l = 0; l < f.cols(); ++l) {
    const auto col = f.column(l);
    gamma += total_variation(g, col) / bf.lovasz_value(col);
  }
  return gamma;
}

DescentState make_descent_state(const Graph& g, const BalanceFunction& bf, Embedding f,
                                std::vector<LabelConstraint> labels) {
  if (f.rows() != g.num_vertices()) throw InvalidInput("embedding row count does not match graph");
  for (const auto& lc : labels) {
    if (lc.vertex < 0 || lc.vertex >= f.rows() || lc.cluster < 0 || lc.cluster >= f.cols())
      throw InvalidInput("label out of range");
    f.set_row_indicator(lc.vertex, lc.cluster);
  }
  DescentState st;
  st.lambda.resize(f.cols());
  st.subgradients.resize(f.cols());
  for (int l = 0; l < f.cols(); ++l) {
    const auto col = f.column(l);
    const double s_val = bf.lovasz_value(col);
    if (!(s_val >= bf.min_value() * 1e-8))
      throw DegenerateColumn("column " + std::to_string(l) + " has balance value " +
                             std::to_string(s_val));
    st.lambda[l] = total_variation(g, col) / s_val;
    st.subgradients[l] = bf.subgradient(col);
    st.gamma += st.lambda[l];
  }
  st.f = std::move(f);
  st.labels = std::move(labels);
  return st;
}

StepResult outer_step(const Graph& g, const BalanceFunction& bf, const DescentState& state,
                      const DescentOptions& options) {
  const LPProblem p = assemble(g, bf, state.f, state.labels, options.size_constraints);
  const int n = g.num_vertices();
  const int k = state.f.cols();

  StepLog log;
  log.outer = state.outer_iteration;
  log.gamma_before = state.gamma;
  log.gamma = state.gamma;
  log.lambda = state.lambda;

  // Repaired, size-feasible iterate with the smallest ratio sum seen so far.
  std::optional<Embedding> best;
  double best_gamma = state.gamma;
  long last_gain = 0;
  long iterations_before = 0;
  auto consider = [&](Embedding candidate) {
    repair(candidate, state.labels);
    if (options.size_constraints && !meets_size_bound(bf, candidate)) return;
    double gamma = 0.0;
    for (int l = 0; l < k; ++l) {
      const auto col = candidate.column(l);
      const double s_val = bf.lovasz_value(col);
      if (!(s_val >= bf.min_value() * 1e-8)) return;
      gamma += total_variation(g, col) / s_val;
    }
    if (gamma < best_gamma) {
      if (!best || gamma < best_gamma * (1.0 - 1e-6)) last_gain = iterations_before;
      best_gamma = gamma;
      best = std::move(candidate);
    }
  };

  PdhgOptions po;
  po.tol = options.inner_tol;
  po.max_iter = options.inner_max_iter;
  if (options.on_residual) {
    const int outer = state.outer_iteration;
    po.on_residual = [&options, outer](const ResidualSample& s) { options.on_residual(outer, s); };
    po.log_every = options.residual_every;
  }
  if (options.monitor_every > 0) {
    po.monitor_every = options.monitor_every;
    po.monitor = [&](long iter, std::span<const double> f) {
      Embedding candidate(n, k);
      std::copy(f.begin(), f.end(), candidate.data().begin());
      const long saved = iterations_before;
      iterations_before += iter;
      consider(std::move(candidate));
      iterations_before = saved;
      return best.has_value() && saved + iter - last_gain >= options.patience;
    };
  }

  LPState cache;
  const LPState* warm = state.last_lp ? &*state.last_lp : nullptr;
  auto terminated = [&](bool inexact) {
    DescentState same = state;
    same.last_lp = std::move(cache);
    log.inexact = inexact;
    return StepResult{StepOutcome::Terminated, std::move(same), log};
  };

  for (int attempt = 0;; ++attempt) {
    const LPSolution sol = pdhg_solve(p, warm, po);
    cache = sol.state;
    warm = &cache;
    // Retries on the same problem continue from where the last solve stopped.
    po.keep_primal = true;
    log.inner_objective = sol.objective;
    log.inner_iterations += sol.iterations;
    log.inner_converged = sol.converged;
    log.inner_tol = po.tol;
    log.early_exit = sol.stopped_by_monitor;
    iterations_before += sol.iterations;
    consider(sol.f);

    if (best) {
      DescentState next = make_descent_state(g, bf, std::move(*best), state.labels);
      if (next.gamma < state.gamma) {
        next.outer_iteration = state.outer_iteration + 1;
        next.last_lp = std::move(cache);
        log.gamma = next.gamma;
        log.lambda = next.lambda;
        log.accepted = true;
        return StepResult{StepOutcome::Accepted, std::move(next), log};
      }
      best.reset();
    }
    const bool can_tighten = attempt < options.max_tightenings;
    if (sol.objective >= -options.eps_descent) {
      if (std::abs(sol.objective) < 10.0 * po.tol && can_tighten) {
        po.tol /= 10.0;
        continue;
      }
      return terminated(false);
    }
    if (!can_tighten) return terminated(true);
    po.tol /= 10.0;
  }
}

DescentResult descent_loop(const Graph& g, const BalanceFunction& bf, Embedding initial,
                           std::vector<LabelConstraint> labels, const DescentOptions& options) {
  DescentResult out;
  out.state = make_descent_state(g, bf, std::move(initial), std::move(labels));
  out.reason = StopReason::MaxOuter;
  for (int t = 0; t < options.max_outer; ++t) {
    StepResult r = outer_step(g, bf, out.state, options);
    out.steps.push_back(r.log);
    const double before = out.state.gamma;
    out.state = std::move(r.state);
    if (r.outcome == StepOutcome::Terminated) {
      out.reason = StopReason::Terminated;
      break;
    }
    const double decrease = (before - out.state.gamma) / std::max(before, 1e-300);
    if (decrease < options.eps) {
      out.reason = StopReason::SmallDecrease;
      break;
    }
  }
  return out;
}

}  // namespace bkcut
