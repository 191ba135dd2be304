#include "bkcut/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bkcut {

double Embedding::simplex_error() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (int l = 0; l < k_; ++l) sum += (*this)(i, l);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double Embedding::distance_to_indicator() const {
  double worst = 0.0;
  for (int i = 0; i < n_; ++i) {
    int best = 0;
    for (int l = 1; l < k_; ++l)
      if ((*this)(i, l) > (*this)(i, best)) best = l;
    for (int l = 0; l < k_; ++l) {
      const double target = (l == best) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs((*this)(i, l) - target));
    }
  }
  return worst;
}

void Embedding::set_row_indicator(int i, int l) {
  for (int c = 0; c < k_; ++c) (*this)(i, c) = (c == l) ? 1.0 : 0.0;
}

void project_rows_to_simplex(Embedding& f) {
  const int k = f.cols();
  std::vector<double> row(k), sorted(k);
  for (int i = 0; i < f.rows(); ++i) {
    for (int l = 0; l < k; ++l) row[l] = f(i, l);
    sorted = row;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double shift = 0.0;
    for (int j = 0; j < k; ++j) {
      cumulative += sorted[j];
      const double candidate = (cumulative - 1.0) / (j + 1);
      if (sorted[j] - candidate > 0.0) shift = candidate;
    }
    for (int l = 0; l < k; ++l) f(i, l) = std::max(0.0, row[l] - shift);
  }
}

}  // namespace bkcut
