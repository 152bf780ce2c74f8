#include "core/typicality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nc {

EmpiricalJoint::EmpiricalJoint(std::size_t x_size, std::size_t y_size)
    : x_size_(x_size), y_size_(y_size), counts_(x_size * y_size, 0) {
  if (x_size_ == 0 || y_size_ == 0) {
    throw std::invalid_argument("EmpiricalJoint: alphabets must be nonempty");
  }
}

std::uint64_t EmpiricalJoint::x_count(std::size_t x) const {
  std::uint64_t c = 0;
  for (std::size_t y = 0; y < y_size_; ++y) {
    c += count(x, y);
  }
  return c;
}

void EmpiricalJoint::add(std::size_t x, std::size_t y) {
  if (x >= x_size_ || y >= y_size_) {
    throw std::out_of_range("EmpiricalJoint::add: symbol out of range");
  }
  ++counts_[x * y_size_ + y];
  ++n_;
}

JointPmf EmpiricalJoint::frequencies() const {
  if (n_ == 0) {
    throw std::logic_error("EmpiricalJoint::frequencies: no observations");
  }
  std::vector<double> v(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    v[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
  }
  return JointPmf(x_size_, y_size_, std::move(v));
}

EmpiricalJoint empirical_joint(std::span<const std::size_t> x, std::span<const std::size_t> y,
                               std::size_t x_size, std::size_t y_size) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("empirical_joint: sequence lengths differ");
  }
  if (x.empty()) {
    throw std::invalid_argument("empirical_joint: sequences must be nonempty");
  }
  EmpiricalJoint e(x_size, y_size);
  for (std::size_t i = 0; i < x.size(); ++i) {
    e.add(x[i], y[i]);
  }
  return e;
}

double max_deviation(const EmpiricalJoint& counts, const JointPmf& q) {
  if (q.rows() != counts.x_size() || q.cols() != counts.y_size()) {
    throw std::invalid_argument("max_deviation: alphabet mismatch with q");
  }
  const double n = static_cast<double>(counts.length());
  double worst = 0.0;
  for (std::size_t x = 0; x < q.rows(); ++x) {
    for (std::size_t y = 0; y < q.cols(); ++y) {
      const auto c = counts.count(x, y);
      if (q(x, y) == 0.0 && c != 0) {
        return std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, std::abs(static_cast<double>(c) - n * q(x, y)) / n);
    }
  }
  return worst;
}

bool jointly_typical(const EmpiricalJoint& counts, const JointPmf& q, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("jointly_typical: eps must be positive");
  }
  if (q.subnormalized()) {
    throw std::invalid_argument("jointly_typical: q must be normalized");
  }
  if (q.rows() != counts.x_size() || q.cols() != counts.y_size()) {
    throw std::invalid_argument("jointly_typical: alphabet mismatch with q");
  }
  // Same statistic the eps calibration thresholds.
  return max_deviation(counts, q) <= eps;
}

bool jointly_typical(std::span<const std::size_t> x, std::span<const std::size_t> y,
                     const JointPmf& q, double eps) {
  return jointly_typical(empirical_joint(x, y, q.rows(), q.cols()), q, eps);
}

bool conditionally_typical(std::span<const std::size_t> y, std::span<const std::size_t> x,
                           const Dmc& w, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("conditionally_typical: eps must be positive");
  }
  const EmpiricalJoint e = empirical_joint(x, y, w.input_size(), w.output_size());
  const double n = static_cast<double>(e.length());
  const double slack = n * eps;
  for (std::size_t a = 0; a < w.input_size(); ++a) {
    const double nx = static_cast<double>(e.x_count(a));
    for (std::size_t b = 0; b < w.output_size(); ++b) {
      const auto c = e.count(a, b);
      if (w(a, b) == 0.0) {
        if (c != 0) {
          return false;
        }
        continue;
      }
      if (std::abs(static_cast<double>(c) - w(a, b) * nx) > slack) {
        return false;
      }
    }
  }
  return true;
}

bool conditionally_typical(std::span<const std::size_t> y, std::span<const std::size_t> x,
                           const MacChannel& w, double eps) {
  return conditionally_typical(y, x, w.flat(), eps);
}

} // namespace nc
