#include "bkcut/inner_lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bkcut/error.hpp"

namespace bkcut {

namespace {

// Per-vertex label column, or -1.
std::vector<int> label_columns(const LPProblem& p) {
  std::vector<int> col(p.num_vertices(), -1);
  for (const auto& lc : p.labels) col[lc.vertex] = lc.cluster;
  return col;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool state_finite(const LPState& s) {
  return all_finite(s.f) && all_finite(s.alpha) && all_finite(s.dplus) && all_finite(s.dminus) &&
         all_finite(s.theta) && all_finite(s.mu) && all_finite(s.zeta) && all_finite(s.nu) &&
         all_finite(s.eta) && all_finite(s.xi);
}

void validate(const LPProblem& p) {
  if (p.graph == nullptr) throw InvalidInput("LP problem has no graph");
  const int n = p.num_vertices();
  if (p.k < 1 || p.anchor.rows() != n || p.anchor.cols() != p.k ||
      p.lambda.size() != static_cast<std::size_t>(p.k) ||
      p.subgradients.size() != static_cast<std::size_t>(p.k))
    throw InvalidInput("LP problem dimensions are inconsistent");
  for (const auto& s : p.subgradients)
    if (s.size() != static_cast<std::size_t>(n)) throw InvalidInput("subgradient length mismatch");
  if (!(p.m > 0.0) || p.m > p.big_m) throw InvalidInput("LP problem requires 0 < m <= M");
}

}  // namespace

LPProblem assemble(const Graph& g, const BalanceFunction& bf, const Embedding& f_t,
                   std::span<const LabelConstraint> labels, bool size_constraints) {
  const int n = g.num_vertices();
  const int k = f_t.cols();
  if (bf.num_vertices() != n || f_t.rows() != n)
    throw InvalidInput("assemble: embedding, graph and balance function disagree on n");
  if (k < 1) throw InvalidInput("assemble: embedding has no columns");

  std::vector<char> seen(n, 0);
  for (const auto& lc : labels) {
    if (lc.vertex < 0 || lc.vertex >= n || lc.cluster < 0 || lc.cluster >= k)
      throw InvalidInput("assemble: label (" + std::to_string(lc.vertex) + ", " +
                         std::to_string(lc.cluster) + ") out of range");
    if (seen[lc.vertex]) throw InvalidInput("assemble: vertex " + std::to_string(lc.vertex) +
                                            " labeled twice");
    seen[lc.vertex] = 1;
  }

  LPProblem p;
  p.graph = &g;
  p.k = k;
  p.anchor = f_t;
  p.labels.assign(labels.begin(), labels.end());
  p.m = bf.min_value();
  p.big_m = bf.max_value();
  p.size_constraints = size_constraints;
  p.lambda.resize(k);
  p.subgradients.resize(k);
  for (int l = 0; l < k; ++l) {
    const auto col = f_t.column(l);
    const double s_val = bf.lovasz_value(col);
    if (!(s_val > 0.0) || (size_constraints && s_val < p.m * (1.0 - 1e-6)))
      throw InfeasibleIterate("assemble: column " + std::to_string(l) + " has S = " +
                              std::to_string(s_val) + " below m = " + std::to_string(p.m));
    p.lambda[l] = total_variation(g, col) / s_val;
    p.subgradients[l] = bf.subgradient(col);
  }
  return p;
}

Preconditioners compute_preconditioners(const LPProblem& p, bool explicit_labels) {
  validate(p);
  const int n = p.num_vertices();
  const int k = p.k;
  const auto& g = *p.graph;
  const auto label_col = label_columns(p);

  Preconditioners pc;
  pc.tau_f.resize(static_cast<std::size_t>(n) * k);
  pc.tau_dplus.assign(k, 1.0 / p.m);
  pc.tau_dminus.assign(k, 1.0 / p.big_m);
  pc.sigma_theta.resize(k);
  pc.sigma_nu.resize(k);
  pc.sigma_mu = 1.0 / k;
  pc.sigma_zeta = 1.0;
  pc.sigma_edge = 1.0 / 3.0;

  const double weight_sum = g.total_weight();
  pc.tau_alpha.resize(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) pc.tau_alpha[e] = 1.0 / (g.edge(e).w + 2.0);

  // The size row contributes |s_i| to each F column, the descent row lambda |s_i|.
  const double size_factor = p.size_constraints ? 1.0 : 0.0;
  for (int l = 0; l < k; ++l) {
    const auto& s = p.subgradients[l];
    double abs_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      abs_sum += std::abs(s[i]);
      const double rho = (explicit_labels && label_col[i] == l) ? 1.0 : 0.0;
      const double denom = (size_factor + p.lambda[l]) * std::abs(s[i]) +
                           2.0 * g.neighbor_count(i) + rho + 1.0;
      pc.tau_f[static_cast<std::size_t>(l) * n + i] = 1.0 / denom;
    }
    pc.sigma_theta[l] = 1.0 / (weight_sum + p.lambda[l] * abs_sum + p.m + p.big_m);
    pc.sigma_nu[l] = abs_sum > 0.0 ? 1.0 / abs_sum : 1.0;
  }
  return pc;
}

LPState start_state(const LPProblem& p, const LPState* previous, bool explicit_labels,
                    bool keep_primal) {
  validate(p);
  const int n = p.num_vertices();
  const int k = p.k;
  const auto& g = *p.graph;
  const std::size_t ne = g.num_edges();

  LPState st;
  Embedding f = p.anchor;
  for (const auto& lc : p.labels) f.set_row_indicator(lc.vertex, lc.cluster);
  st.f.assign(f.data().begin(), f.data().end());
  st.alpha.resize(ne * k);
  for (int l = 0; l < k; ++l)
    for (std::size_t e = 0; e < ne; ++e) {
      const auto& ed = g.edge(e);
      st.alpha[l * ne + e] = std::abs(f(ed.u, l) - f(ed.v, l));
    }
  st.dplus.assign(k, 0.0);
  st.dminus.assign(k, 0.0);

  const std::size_t n_zeta = explicit_labels ? p.labels.size() : 0;
  const bool reuse = previous != nullptr && previous->theta.size() == static_cast<std::size_t>(k) &&
                     previous->mu.size() == static_cast<std::size_t>(n) &&
                     previous->nu.size() == static_cast<std::size_t>(k) &&
                     previous->eta.size() == ne * k && previous->xi.size() == ne * k;
  if (reuse && keep_primal && previous->f.size() == st.f.size() &&
      previous->alpha.size() == st.alpha.size() && previous->dplus.size() == st.dplus.size() &&
      previous->dminus.size() == st.dminus.size()) {
    st.f = previous->f;
    for (const auto& lc : p.labels)
      for (int l = 0; l < k; ++l)
        st.f[static_cast<std::size_t>(l) * n + lc.vertex] = (l == lc.cluster) ? 1.0 : 0.0;
    st.alpha = previous->alpha;
    st.dplus = previous->dplus;
    st.dminus = previous->dminus;
  }
  if (reuse) {
    st.theta = previous->theta;
    st.mu = previous->mu;
    st.nu = previous->nu;
    st.eta = previous->eta;
    st.xi = previous->xi;
    st.zeta = previous->zeta.size() == n_zeta ? previous->zeta : std::vector<double>(n_zeta, 0.0);
    // Simplex duals of rows that are now fixed play no further role.
    if (!explicit_labels)
      for (const auto& lc : p.labels) st.mu[lc.vertex] = 0.0;
  } else {
    st.theta.assign(k, 0.0);
    st.mu.assign(n, 0.0);
    st.zeta.assign(n_zeta, 0.0);
    st.nu.assign(k, 0.0);
    st.eta.assign(ne * k, 0.0);
    st.xi.assign(ne * k, 0.0);
  }
  return st;
}

LPSolution pdhg_solve(const LPProblem& p, const LPState* warm_start, const PdhgOptions& options) {
  validate(p);
  bool finite_data = all_finite(p.lambda) &&
                     std::all_of(p.anchor.data().begin(), p.anchor.data().end(),
                                 [](double x) { return std::isfinite(x); });
  for (const auto& s : p.subgradients) finite_data = finite_data && all_finite(s);
  if (!finite_data) throw NumericFailure("LP data contains non-finite values", 0);
  const bool explicit_labels = options.explicit_labels;
  const auto pc = compute_preconditioners(p, explicit_labels);
  LPState st = start_state(p, warm_start, explicit_labels, options.keep_primal);

  const int n = p.num_vertices();
  const int k = p.k;
  const auto& g = *p.graph;
  const std::size_t ne = g.num_edges();
  const std::size_t nf = static_cast<std::size_t>(n) * k;
  const double m = p.m;
  const double big_m = p.big_m;

  std::vector<int> eu(ne), ev(ne);
  std::vector<double> ew(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    eu[e] = g.edge(e).u;
    ev[e] = g.edge(e).v;
    ew[e] = g.edge(e).w;
  }
  const auto label_col = label_columns(p);
  // Rows whose entries are frozen (label elimination).
  std::vector<char> frozen(n, 0);
  std::vector<int> zeta_index(n, -1);
  if (explicit_labels) {
    for (std::size_t j = 0; j < p.labels.size(); ++j) zeta_index[p.labels[j].vertex] = static_cast<int>(j);
  } else {
    for (const auto& lc : p.labels) frozen[lc.vertex] = 1;
  }

  std::vector<double> f_next(nf), f_bar(nf), a_next(ne * k), a_bar(ne * k);
  std::vector<double> dp_next(k), dm_next(k), bz(n), row_sum(n);

  LPSolution sol;
  long iter = 0;
  double primal_res = 0.0, dual_res = 0.0;
  double v_desc = 0.0, v_simplex = 0.0, v_size = 0.0, v_edge = 0.0, v_label = 0.0;
  bool converged = false;

  for (iter = 1; iter <= options.max_iter; ++iter) {
    primal_res = 0.0;
    dual_res = 0.0;

    // Primal step: x <- max(0, x - tau (c + A^T y)).
    for (int l = 0; l < k; ++l) {
      const auto& s = p.subgradients[l];
      const double coef = -st.theta[l] * p.lambda[l] - (p.size_constraints ? st.nu[l] : 0.0);
      const std::size_t eo = l * ne;
      const std::size_t fo = static_cast<std::size_t>(l) * n;
      std::fill(bz.begin(), bz.end(), 0.0);
      for (std::size_t e = 0; e < ne; ++e) {
        const double d = st.eta[eo + e] - st.xi[eo + e];
        bz[eu[e]] += d;
        bz[ev[e]] -= d;
      }
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = fo + i;
        if (frozen[i]) {
          f_next[idx] = st.f[idx];
          continue;
        }
        double grad = coef * s[i] + st.mu[i] + bz[i];
        if (zeta_index[i] >= 0 && label_col[i] == l) grad += st.zeta[zeta_index[i]];
        f_next[idx] = std::max(st.f[idx] - pc.tau_f[idx] * grad, 0.0);
        primal_res = std::max(primal_res, std::abs(f_next[idx] - st.f[idx]));
      }
      for (std::size_t e = 0; e < ne; ++e) {
        const std::size_t idx = eo + e;
        const double grad = st.theta[l] * ew[e] - st.eta[idx] - st.xi[idx];
        a_next[idx] = std::max(st.alpha[idx] - pc.tau_alpha[e] * grad, 0.0);
        primal_res = std::max(primal_res, std::abs(a_next[idx] - st.alpha[idx]));
      }
      dp_next[l] = std::max(st.dplus[l] - pc.tau_dplus[l] * (1.0 - m * st.theta[l]), 0.0);
      dm_next[l] = std::max(st.dminus[l] - pc.tau_dminus[l] * (big_m * st.theta[l] - 1.0), 0.0);
      primal_res = std::max({primal_res, std::abs(dp_next[l] - st.dplus[l]),
                             std::abs(dm_next[l] - st.dminus[l])});
    }

    // Extrapolation.
    for (std::size_t j = 0; j < nf; ++j) f_bar[j] = 2.0 * f_next[j] - st.f[j];
    for (std::size_t j = 0; j < ne * k; ++j) a_bar[j] = 2.0 * a_next[j] - st.alpha[j];

    // Dual step: y <- proj(y + sigma (A x_bar - b)).
    v_desc = v_simplex = v_size = v_edge = v_label = 0.0;
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    for (int l = 0; l < k; ++l) {
      const auto& s = p.subgradients[l];
      const std::size_t eo = l * ne;
      const std::size_t fo = static_cast<std::size_t>(l) * n;
      double s_f = 0.0;
      for (int i = 0; i < n; ++i) {
        s_f += s[i] * f_bar[fo + i];
        row_sum[i] += f_bar[fo + i];
      }
      double w_a = 0.0;
      for (std::size_t e = 0; e < ne; ++e) w_a += ew[e] * a_bar[eo + e];
      const double dp_bar = 2.0 * dp_next[l] - st.dplus[l];
      const double dm_bar = 2.0 * dm_next[l] - st.dminus[l];

      const double desc = w_a - p.lambda[l] * s_f - m * dp_bar + big_m * dm_bar;
      const double theta = std::max(st.theta[l] + pc.sigma_theta[l] * desc, 0.0);
      dual_res = std::max(dual_res, std::abs(theta - st.theta[l]));
      st.theta[l] = theta;
      v_desc = std::max(v_desc, pc.sigma_theta[l] * std::max(desc, 0.0));

      if (p.size_constraints) {
        const double gap = m - s_f;
        const double nu = std::max(st.nu[l] + pc.sigma_nu[l] * gap, 0.0);
        dual_res = std::max(dual_res, std::abs(nu - st.nu[l]));
        st.nu[l] = nu;
        v_size = std::max(v_size, pc.sigma_nu[l] * std::max(gap, 0.0));
      }

      for (std::size_t e = 0; e < ne; ++e) {
        const std::size_t idx = eo + e;
        const double diff = f_bar[fo + eu[e]] - f_bar[fo + ev[e]];
        const double eta = std::max(st.eta[idx] + pc.sigma_edge * (diff - a_bar[idx]), 0.0);
        const double xi = std::max(st.xi[idx] + pc.sigma_edge * (-diff - a_bar[idx]), 0.0);
        dual_res = std::max({dual_res, std::abs(eta - st.eta[idx]), std::abs(xi - st.xi[idx])});
        st.eta[idx] = eta;
        st.xi[idx] = xi;
        v_edge = std::max(v_edge, pc.sigma_edge * std::max(std::abs(diff) - a_bar[idx], 0.0));
      }
    }
    for (int i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      const double r = row_sum[i] - 1.0;
      const double step = pc.sigma_mu * r;
      st.mu[i] += step;
      dual_res = std::max(dual_res, std::abs(step));
      v_simplex = std::max(v_simplex, std::abs(step));
    }
    if (explicit_labels) {
      for (std::size_t j = 0; j < p.labels.size(); ++j) {
        const auto& lc = p.labels[j];
        const double r = f_bar[static_cast<std::size_t>(lc.cluster) * n + lc.vertex] - 1.0;
        const double step = pc.sigma_zeta * r;
        st.zeta[j] += step;
        dual_res = std::max(dual_res, std::abs(step));
        v_label = std::max(v_label, std::abs(step));
      }
    }

    st.f.swap(f_next);
    st.alpha.swap(a_next);
    st.dplus.swap(dp_next);
    st.dminus.swap(dm_next);

    const double violation = std::max({v_desc, v_simplex, v_size, v_edge, v_label});
    const bool check_finite = (iter % 64 == 0) || !std::isfinite(primal_res + dual_res + violation);
    if (check_finite && !state_finite(st))
      throw NumericFailure("PDHG iterate became non-finite", iter);

    if (options.on_residual && options.log_every > 0 && iter % options.log_every == 0) {
      double obj = 0.0;
      for (int l = 0; l < k; ++l) obj += st.dplus[l] - st.dminus[l];
      options.on_residual({iter, primal_res, dual_res, violation, obj});
    }
    if (std::max({primal_res, dual_res, violation}) < options.tol) {
      converged = true;
      break;
    }
    if (options.monitor && options.monitor_every > 0 && iter % options.monitor_every == 0 &&
        options.monitor(iter, st.f)) {
      sol.stopped_by_monitor = true;
      break;
    }
  }
  if (!state_finite(st)) throw NumericFailure("PDHG iterate became non-finite", iter);

  sol.f = Embedding(n, k);
  std::copy(st.f.begin(), st.f.end(), sol.f.data().begin());
  sol.dplus = st.dplus;
  sol.dminus = st.dminus;
  sol.objective = 0.0;
  for (int l = 0; l < k; ++l) sol.objective += st.dplus[l] - st.dminus[l];
  sol.primal_residual = primal_res;
  sol.dual_residual = dual_res;
  sol.descent_violation = v_desc;
  sol.simplex_violation = v_simplex;
  sol.size_violation = v_size;
  sol.edge_violation = v_edge;
  sol.label_violation = v_label;
  sol.violation = std::max({v_desc, v_simplex, v_size, v_edge, v_label});
  sol.iterations = std::min(iter, options.max_iter);
  sol.converged = converged;
  sol.state = std::move(st);
  return sol;
}

}  // namespace bkcut
