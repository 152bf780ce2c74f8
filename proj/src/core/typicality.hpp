#pragma once

// Strong typicality tests on empirical joint counts. Both tests depend on
// the sequences only through their joint type, so they are invariant under
// any common permutation of positions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/channel.hpp"
#include "core/infotheory.hpp"

namespace nc {

/// Exact counts of (x, y) pairs over sequences of length n.
class EmpiricalJoint {
public:
  EmpiricalJoint(std::size_t x_size, std::size_t y_size);

  std::size_t x_size() const { return x_size_; }
  std::size_t y_size() const { return y_size_; }
  std::uint64_t length() const { return n_; }
  std::uint64_t count(std::size_t x, std::size_t y) const { return counts_[x * y_size_ + y]; }
  std::uint64_t x_count(std::size_t x) const;
  void add(std::size_t x, std::size_t y);

  /// count / n, or an empty JointPmf request when n = 0.
  JointPmf frequencies() const;

private:
  std::size_t x_size_;
  std::size_t y_size_;
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> counts_;
};

EmpiricalJoint empirical_joint(std::span<const std::size_t> x, std::span<const std::size_t> y,
                               std::size_t x_size, std::size_t y_size);

/// max over cells of |count/n - q|, or +inf if a q-null cell was observed.
double max_deviation(const EmpiricalJoint& counts, const JointPmf& q);

/// (x, y) in the strongly typical set of q: every cell within eps of q and
/// no observation in a q-null cell.
bool jointly_typical(const EmpiricalJoint& counts, const JointPmf& q, double eps);
bool jointly_typical(std::span<const std::size_t> x, std::span<const std::size_t> y,
                     const JointPmf& q, double eps);

/// y in the conditionally typical set of x under W: for every (x, y),
/// |N(x,y)/n - W_x(y) N(x)/n| <= eps, and no observation where W_x(y) = 0.
/// `x` holds flat product-alphabet indices.
bool conditionally_typical(std::span<const std::size_t> y, std::span<const std::size_t> x,
                           const Dmc& w, double eps);
bool conditionally_typical(std::span<const std::size_t> y, std::span<const std::size_t> x,
                           const MacChannel& w, double eps);

} // namespace nc
