#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bkcut/graph.hpp"

namespace bkcut {

enum class BalanceKind {
  RatioCut,               // |C|
  RatioCheegerSym,        // min{|C|, |V\C|}
  RatioCheegerAsym,       // min{(k-1)|C|, |V\C|}
  NormalizedCut,          // vol(C)
  NormalizedCheegerSym,   // min{vol(C), vol(V\C)}
  NormalizedCheegerAsym,  // min{(k-1)vol(C), vol(V\C)}
};

// Accepts the CLI spellings rcut, rcc-sym, rcc-asym, ncut, ncc-sym, ncc-asym.
BalanceKind parse_balance_kind(std::string_view name);
std::string_view to_string(BalanceKind kind);
inline constexpr BalanceKind kAllBalanceKinds[] = {
    BalanceKind::RatioCut,      BalanceKind::RatioCheegerSym,      BalanceKind::RatioCheegerAsym,
    BalanceKind::NormalizedCut, BalanceKind::NormalizedCheegerSym, BalanceKind::NormalizedCheegerAsym};

// A submodular balancing set function bound to a graph.
//
// Every supported kind depends on C only through its mass (cardinality, or
// volume for the normalized kinds), so it is stored as a concave profile
// h(mass) with h(0) = 0. The Lovasz extension and the greedy subgradient both
// walk the vertices in increasing order of f (stable in vertex id) and take
// differences of h over the positional suffixes of that order.
class BalanceFunction {
 public:
  BalanceFunction(BalanceKind kind, int k, const Graph& g);

  BalanceKind kind() const { return kind_; }
  int clusters() const { return k_; }
  int num_vertices() const { return static_cast<int>(weights_.size()); }
  bool symmetric() const;
  bool volume_weighted() const;

  // Mass of a single vertex (1 or d_i) and of V.
  double vertex_mass(int v) const { return weights_[v]; }
  double total_mass() const { return total_; }

  // h(mass): the set value of any C with that mass.
  double value_of_mass(double mass) const;
  double set_value(const VertexSet& c) const;
  double set_value(std::span<const char> mask) const;

  double lovasz_value(std::span<const double> f) const;
  std::vector<double> subgradient(std::span<const double> f) const;

  // m: smallest value over the sets of a valid k-partition; M: upper bound of
  // S over [0,1]^n.
  double min_value() const { return m_; }
  double max_value() const { return big_m_; }

 private:
  std::vector<int> increasing_order(std::span<const double> f) const;
  std::vector<double> superlevel_values(std::span<const int> order) const;

  BalanceKind kind_;
  int k_;
  std::vector<double> weights_;
  double total_ = 0.0;
  double m_ = 0.0;
  double big_m_ = 0.0;
};

}  // namespace bkcut
