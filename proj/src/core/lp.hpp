#pragma once

#include <cstddef>
#include <vector>

namespace nc::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Dense standard-form problem: minimize c.x subject to A x = b, x >= 0.
/// A is row-major, rows = b.size(), cols = c.size().
struct Problem {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
};

/// Two-phase tableau simplex with Bland's rule. Intended for the small
/// problems this library builds (tens of variables); `tol` is the pivot and
/// feasibility tolerance.
Solution solve(const Problem& problem, double tol = 1e-9);

} // namespace nc::lp
