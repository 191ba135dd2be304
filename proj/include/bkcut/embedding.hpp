#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bkcut {

// n x k nonnegative matrix whose rows are meant to lie on the simplex.
// Stored column-major: each column (one cluster) is contiguous.
class Embedding {
 public:
  Embedding() = default;
  Embedding(int n, int k, double fill = 0.0)
      : n_(n), k_(k), data_(static_cast<std::size_t>(n) * k, fill) {}

  int rows() const { return n_; }
  int cols() const { return k_; }

  double& operator()(int i, int l) { return data_[static_cast<std::size_t>(l) * n_ + i]; }
  double operator()(int i, int l) const { return data_[static_cast<std::size_t>(l) * n_ + i]; }

  std::span<double> column(int l) { return {data_.data() + static_cast<std::size_t>(l) * n_,
                                            static_cast<std::size_t>(n_)}; }
  std::span<const double> column(int l) const {
    return {data_.data() + static_cast<std::size_t>(l) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  // Largest |row sum - 1| over all rows.
  double simplex_error() const;
  // Largest distance of any entry from {0, 1} when every row has a single 1.
  double distance_to_indicator() const;

  void set_row_indicator(int i, int l);

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<double> data_;
};

// Euclidean projection of every row onto the probability simplex.
void project_rows_to_simplex(Embedding& f);

}  // namespace bkcut
