#include "bkcut/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bkcut/error.hpp"

namespace bkcut {

BalanceKind parse_balance_kind(std::string_view name) {
  if (name == "rcut") return BalanceKind::RatioCut;
  if (name == "rcc-sym") return BalanceKind::RatioCheegerSym;
  if (name == "rcc-asym") return BalanceKind::RatioCheegerAsym;
  if (name == "ncut") return BalanceKind::NormalizedCut;
  if (name == "ncc-sym") return BalanceKind::NormalizedCheegerSym;
  if (name == "ncc-asym") return BalanceKind::NormalizedCheegerAsym;
  throw InvalidInput("unknown balance kind '" + std::string(name) + "'");
}

std::string_view to_string(BalanceKind kind) {
  switch (kind) {
    case BalanceKind::RatioCut: return "rcut";
    case BalanceKind::RatioCheegerSym: return "rcc-sym";
    case BalanceKind::RatioCheegerAsym: return "rcc-asym";
    case BalanceKind::NormalizedCut: return "ncut";
    case BalanceKind::NormalizedCheegerSym: return "ncc-sym";
    case BalanceKind::NormalizedCheegerAsym: return "ncc-asym";
  }
  return "unknown";
}

BalanceFunction::BalanceFunction(BalanceKind kind, int k, const Graph& g) : kind_(kind), k_(k) {
  const int n = g.num_vertices();
  if (n < 2) throw InvalidInput("balance function needs at least 2 vertices");
  const bool asym =
      kind == BalanceKind::RatioCheegerAsym || kind == BalanceKind::NormalizedCheegerAsym;
  if (k < 1 || (asym && (k < 2 || k > n)))
    throw InvalidInput("invalid cluster count " + std::to_string(k) + " for " +
                       std::string(to_string(kind)));

  if (volume_weighted()) {
    weights_.assign(g.degrees().begin(), g.degrees().end());
  } else {
    weights_.assign(n, 1.0);
  }
  total_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  const double min_mass = *std::min_element(weights_.begin(), weights_.end());
  if (!(min_mass > 0.0))
    throw InvalidInput("normalized balance requires every vertex to have positive degree");

  switch (kind) {
    case BalanceKind::RatioCut:
      m_ = 1.0;
      big_m_ = n;
      break;
    case BalanceKind::RatioCheegerSym:
      m_ = 1.0;
      big_m_ = std::floor(n / 2.0);
      break;
    case BalanceKind::RatioCheegerAsym: {
      m_ = k - 1;
      double best = 0.0;
      for (int c = 0; c <= n; ++c) best = std::max(best, std::min<double>((k - 1.0) * c, n - c));
      big_m_ = best;
      break;
    }
    case BalanceKind::NormalizedCut:
      m_ = min_mass;
      big_m_ = total_;
      break;
    case BalanceKind::NormalizedCheegerSym:
      m_ = min_mass;
      big_m_ = total_ / 2.0;
      break;
    case BalanceKind::NormalizedCheegerAsym:
      m_ = (k - 1) * min_mass;
      big_m_ = (k - 1.0) * total_ / k;
      break;
  }
}

bool BalanceFunction::symmetric() const {
  return kind_ == BalanceKind::RatioCheegerSym || kind_ == BalanceKind::NormalizedCheegerSym;
}

bool BalanceFunction::volume_weighted() const {
  return kind_ == BalanceKind::NormalizedCut || kind_ == BalanceKind::NormalizedCheegerSym ||
         kind_ == BalanceKind::NormalizedCheegerAsym;
}

double BalanceFunction::value_of_mass(double mass) const {
  const double rest = total_ - mass;
  switch (kind_) {
    case BalanceKind::RatioCut:
    case BalanceKind::NormalizedCut:
      return mass;
    case BalanceKind::RatioCheegerSym:
    case BalanceKind::NormalizedCheegerSym:
      return std::min(mass, rest);
    case BalanceKind::RatioCheegerAsym:
    case BalanceKind::NormalizedCheegerAsym:
      return std::min((k_ - 1) * mass, rest);
  }
  return 0.0;
}

double BalanceFunction::set_value(std::span<const char> mask) const {
  if (mask.size() != weights_.size()) throw InvalidInput("set_value: mask length mismatch");
  // Accumulated from the highest id down, the same order in which the Lovasz
  // extension accumulates superlevel masses, so S(1_C) reproduces this bit for bit.
  double mass = 0.0;
  std::size_t count = 0;
  for (std::size_t i = mask.size(); i-- > 0;) {
    if (mask[i]) {
      mass += weights_[i];
      ++count;
    }
  }
  if (count == 0) return 0.0;
  if (count == mask.size()) return value_of_mass(total_);
  return value_of_mass(mass);
}

double BalanceFunction::set_value(const VertexSet& c) const {
  if (c.universe() != num_vertices()) throw InvalidInput("set_value: universe mismatch");
  const auto m = c.mask();
  return set_value(std::span<const char>(m));
}

std::vector<int> BalanceFunction::increasing_order(std::span<const double> f) const {
  if (f.size() != weights_.size())
    throw InvalidInput("balance: vector length " + std::to_string(f.size()) +
                       " does not match vertex count " + std::to_string(weights_.size()));
  std::vector<int> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
  return order;
}

std::vector<double> BalanceFunction::superlevel_values(std::span<const int> order) const {
  // levels[i] = h(mass of {order[i], ..., order[n-1]}), levels[n] = h(0) = 0.
  const std::size_t n = order.size();
  std::vector<double> levels(n + 1, 0.0);
  double mass = 0.0;
  for (std::size_t i = n; i-- > 1;) {
    mass += weights_[order[i]];
    levels[i] = value_of_mass(mass);
  }
  levels[0] = value_of_mass(total_);
  return levels;
}

std::vector<double> BalanceFunction::subgradient(std::span<const double> f) const {
  const auto order = increasing_order(f);
  const auto levels = superlevel_values(order);
  std::vector<double> s(f.size(), 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) s[order[i]] = levels[i] - levels[i + 1];
  return s;
}

double BalanceFunction::lovasz_value(std::span<const double> f) const {
  const auto order = increasing_order(f);
  if (order.empty()) return 0.0;
  const auto levels = superlevel_values(order);
  // Layer-cake form: f_(0) h(V) + sum_i (f_(i) - f_(i-1)) h(mass of positions >= i).
  double value = f[order[0]] * levels[0];
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double jump = f[order[i]] - f[order[i - 1]];
    if (jump != 0.0) value += jump * levels[i];
  }
  return value;
}

}  // namespace bkcut
