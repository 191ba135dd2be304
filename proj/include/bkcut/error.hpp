#pragma once

#include <stdexcept>
#include <string>

namespace bkcut {

// Malformed or out-of-contract input (sizes, ranges, parse failures).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A column of the current iterate violates S(F_l) >= m.
class InfeasibleIterate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A column's balance value collapsed toward zero, so its ratio is meaningless.
class DegenerateColumn : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values appeared inside an iterative solver.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace bkcut
