#include "core/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nc::lp {

namespace {

class Tableau {
public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs slot holds -objective.
  double& cost(std::size_t c) { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) {
      at(pr, c) *= inv;
    }
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) {
        continue;
      }
      const double f = at(r, pc);
      if (f == 0.0) {
        continue;
      }
      for (std::size_t c = 0; c <= cols_; ++c) {
        at(r, c) -= f * at(pr, c);
      }
    }
    basis_[pr] = pc;
  }

  // Minimizes over columns [0, active_cols). Returns false if unbounded.
  bool optimize(std::size_t active_cols, double tol) {
    for (;;) {
      std::size_t enter = active_cols;
      for (std::size_t c = 0; c < active_cols; ++c) {
        if (cost(c) < -tol) {
          enter = c; // Bland: lowest index
          break;
        }
      }
      if (enter == active_cols) {
        return true;
      }
      std::size_t leave = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a > tol) {
          const double ratio = rhs(r) / a;
          if (ratio < best_ratio - tol ||
              (std::abs(ratio - best_ratio) <= tol && leave < rows_ && basis_[r] < basis_[leave])) {
            best_ratio = ratio;
            leave = r;
          }
        }
      }
      if (leave == rows_) {
        return false;
      }
      pivot(leave, enter);
    }
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

} // namespace

Solution solve(const Problem& problem, double tol) {
  const std::size_t m = problem.b.size();
  const std::size_t n = problem.c.size();
  if (problem.a.size() != m * n) {
    throw std::invalid_argument("lp::solve: constraint matrix has wrong size");
  }

  // Columns: n structural, then m artificials.
  Tableau t(m, n + m);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = problem.b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < n; ++c) {
      t.at(r, c) = sign * problem.a[r * n + c];
    }
    t.at(r, n + r) = 1.0;
    t.rhs(r) = sign * problem.b[r];
    t.basis()[r] = n + r;
  }

  // Phase 1: minimize the sum of artificials.
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      t.cost(c) -= t.at(r, c);
    }
    t.cost(n + m) -= t.rhs(r);
  }
  t.optimize(n + m, tol);
  Solution sol;
  if (-t.cost(n + m) > tol * static_cast<double>(m + 1) * 10.0) {
    sol.status = Status::Infeasible;
    return sol;
  }

  // Drive leftover artificials out of the basis; rows where that is
  // impossible are redundant and stay inert at zero.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis()[r] < n) {
      continue;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (std::abs(t.at(r, c)) > tol) {
        t.pivot(r, c);
        break;
      }
    }
  }

  // Phase 2 over structural columns only.
  for (std::size_t c = 0; c <= n + m; ++c) {
    t.cost(c) = 0.0;
  }
  for (std::size_t c = 0; c < n; ++c) {
    t.cost(c) = problem.c[c];
  }
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bc = t.basis()[r];
    if (bc < n && problem.c[bc] != 0.0) {
      const double f = problem.c[bc];
      for (std::size_t c = 0; c <= n + m; ++c) {
        t.cost(c) -= f * t.at(r, c);
      }
    }
  }
  if (!t.optimize(n, tol)) {
    sol.status = Status::Unbounded;
    return sol;
  }

  sol.status = Status::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis()[r] < n) {
      sol.x[t.basis()[r]] = std::max(0.0, t.rhs(r));
    }
  }
  sol.objective = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    sol.objective += problem.c[c] * sol.x[c];
  }
  return sol;
}

} // namespace nc::lp
