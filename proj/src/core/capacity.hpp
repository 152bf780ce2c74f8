#pragma once

// Commitment rate regions and capacities: the set function T -> H(X_T|Y),
// its polymatroid checks and greedy corners, and the maximizations of
// H(X_L|Y) (joint or product inputs) and of min_b H(X|Y_b).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/channel.hpp"
#include "core/infotheory.hpp"

namespace nc {

/// Real-valued function on subsets of {0, ..., L-1}, indexed by bitmask.
class SetFunction {
public:
  SetFunction(unsigned num_users, std::vector<double> values);

  unsigned num_users() const { return num_users_; }
  SubsetMask full() const { return (SubsetMask{1} << num_users_) - 1; }
  double operator()(SubsetMask t) const { return values_.at(t); }
  std::span<const double> values() const { return values_; }

private:
  unsigned num_users_;
  std::vector<double> values_;
};

struct PolymatroidCheck {
  bool ok = true;
  /// "normalized", "monotone" or "submodular" when !ok.
  std::string violated;
  SubsetMask u = 0;
  SubsetMask v = 0;
  double excess = 0.0;
};

/// Exhaustive check of f(empty) = 0, monotonicity and submodularity within
/// tol. Requires L <= 10.
PolymatroidCheck verify_polymatroid(const SetFunction& f, double tol = 1e-9);

/// Greedy (Edmonds) corner for the elimination order `perm`: user perm[k]
/// receives f({perm[k], ..., perm[L-1]}) - f({perm[k+1], ..., perm[L-1]}).
/// Throws std::invalid_argument if f is not a polymatroid or perm is not a
/// permutation.
std::vector<double> corner_point(const SetFunction& f, std::span<const std::size_t> perm);

enum class InputConstraint { Joint, Product };

/// Input law on the product alphabet X_1 x ... x X_L.
class InputDistribution {
public:
  /// Unconstrained joint law.
  InputDistribution(std::vector<std::size_t> sizes, Pmf joint);
  /// Product of independent per-user laws.
  static InputDistribution product(std::span<const Pmf> factors);
  static InputDistribution uniform(std::vector<std::size_t> sizes, InputConstraint constraint);

  const ProductAlphabet& alphabet() const { return alphabet_; }
  const Pmf& joint() const { return joint_; }
  InputConstraint constraint() const { return constraint_; }
  /// Per-user laws; only for product-constrained distributions.
  const std::vector<Pmf>& factors() const;
  /// Marginal of user l.
  Pmf user_marginal(std::size_t user) const;

private:
  ProductAlphabet alphabet_;
  Pmf joint_;
  InputConstraint constraint_ = InputConstraint::Joint;
  std::vector<Pmf> factors_;
};

/// Joint law of (X_T, Y) with X_T flattened in first-slowest order over the
/// users of T in increasing index.
JointPmf subset_joint(const MacChannel& m, const Pmf& joint_input, SubsetMask t);

/// T -> H(X_T | Y) under p_{X_L} p_{Y|X_L}.
SetFunction entropy_set_function(const MacChannel& m, const InputDistribution& p);

struct RateRegionSpec {
  SetFunction f;
  InputDistribution p;
};

RateRegionSpec rate_region(const MacChannel& m, const InputDistribution& p);

/// R_T <= f(T) + tol for every nonempty T, with R_T the sum over T.
bool in_region(std::span<const double> rates, const RateRegionSpec& spec, double tol = 1e-9);

enum class CollusionMode { Colluding, NonColluding };

struct CapacityResult {
  double value = 0.0;
  InputDistribution argmax;
  /// Empty unless the channel is redundant, where the capacity formula need not hold.
  std::string warning;
};

/// max H(X_L|Y) over joint inputs (colluding) or product inputs
/// (non-colluding). Deterministic for a given seed.
CapacityResult sum_rate_capacity(const MacChannel& m, CollusionMode mode, std::uint64_t seed = 0);

/// max_p H(X|Y) for a point-to-point channel.
CapacityResult commitment_capacity(const Dmc& w, std::uint64_t seed = 0);

/// max_p min_b H(X|Y_b).
CapacityResult broadcast_capacity(const BroadcastChannel& bc, std::uint64_t seed = 0);

/// H(X|Y) for input p through w.
double conditional_entropy_through(const Dmc& w, const Pmf& p);

} // namespace nc
