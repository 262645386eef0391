#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace emdq {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent inputs (bad dimensions, non-finite values,
// parameter ranges, file contents).
class InputError : public Error {
 public:
  using Error::Error;
};

// File parsing failures.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// Total supply and demand differ beyond tolerance.
class BalanceError : public Error {
 public:
  using Error::Error;
};

// A solver could not produce a valid result (pivot cap, infeasible basis,
// oversized cost matrix).
class SolverError : public Error {
 public:
  using Error::Error;
};

// All floating-point tolerances live here. The values are the defaults used
// throughout the library; callers may pass adjusted copies.
struct Tolerances {
  // Relative imbalance allowed between total supply and total demand,
  // measured against the instance's reference mass.
  double balance_rel = 1e-9;
  // Plan marginal feasibility: absolute slack per point is marginal_rel * W.
  double marginal_rel = 1e-7;
  // Relative slack when recomputing a plan's cost from its flows.
  double cost_rel = 1e-9;
  // Solver-level cost comparisons: absolute slack is
  // solver_cost_rel * W * max_distance.
  double solver_cost_rel = 1e-7;
  // Absolute slack for the exact-tie fast path in threshold queries.
  double tie_abs = 1e-12;
};

// Neumaier variant of Kahan summation. Deterministic for a fixed sequence.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace emdq
