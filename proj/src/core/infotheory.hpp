#pragma once

// Exact-formula information measures over finite alphabets, plus the
// analytic bounds used to pick commitment rates and certify concealment.
// All logarithms are base 2; every quantity is in bits.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace nc {

/// Absolute tolerance on total probability mass.
inline constexpr double kMassTolerance = 1e-12;

/// Probability vector over an indexed finite alphabet.
///
/// Construction validates the entries: negative or non-finite entries are
/// rejected; a total mass within kMassTolerance of 1 is renormalized,
/// anything further off is rejected rather than silently rescaled.
class Pmf {
public:
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t size);
  static Pmf point_mass(std::size_t size, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Pmf&, const Pmf&) = default;

private:
  std::vector<double> probs_;
};

/// Non-negative function on a product alphabet X x Z, stored row-major with
/// X indexing rows. Normalized unless flagged subnormalized, in which case
/// total mass may be anywhere in [0, 1].
class JointPmf {
public:
  JointPmf(std::size_t rows, std::size_t cols, std::vector<double> values,
           bool subnormalized = false);

  /// Joint of an input law and a row-stochastic matrix: p(x) W(z|x).
  static JointPmf from_conditional(const Pmf& px, std::size_t cols,
                                   std::span<const double> row_major_channel);
  static JointPmf product(const Pmf& px, const Pmf& pz);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool subnormalized() const { return subnormalized_; }
  double operator()(std::size_t x, std::size_t z) const { return values_[x * cols_ + z]; }
  std::span<const double> values() const { return values_; }
  double total_mass() const;

  /// Marginal over rows (X) and columns (Z). Only defined when normalized.
  Pmf row_marginal() const;
  Pmf col_marginal() const;
  /// The joint read as one distribution over |X|*|Z| cells.
  Pmf flatten() const;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
  bool subnormalized_;
};

/// Subsets of bidders {0, ..., L-1} as bitmasks; bit l set means bidder l is
/// in the subset.
using SubsetMask = std::uint32_t;

/// Bit-lengths r_T for every nonempty subset T.
class RateVector {
public:
  RateVector() = default;
  explicit RateVector(std::map<SubsetMask, double> by_subset) : by_subset_(std::move(by_subset)) {}

  /// r_T = sum of per-user rates over T, for every nonempty T.
  static RateVector from_user_rates(std::span<const double> per_user);

  const std::map<SubsetMask, double>& by_subset() const { return by_subset_; }
  double at(SubsetMask t) const;

private:
  std::map<SubsetMask, double> by_subset_;
};

/// Shannon entropy, 0 log 0 = 0.
double entropy(const Pmf& p);

/// H(X|Z) = H(X,Z) - H(Z) with X on rows. Rejects subnormalized input.
double conditional_entropy(const JointPmf& joint);

/// I(X;Z) = H(X) - H(X|Z).
double mutual_information(const JointPmf& joint);

/// Half the l1 distance. Alphabets must match.
double variational_distance(const Pmf& p, const Pmf& q);

/// -log2 max_{x, z in supp(qz)} w(x,z) / qz(z).
///
/// Requires supp(qz) to contain the support of the Z-marginal of w; cells
/// outside supp(qz) then carry no mass and the ratio is never 0/0.
double conditional_min_entropy(const JointPmf& w, const Pmf& qz);

/// sqrt(sum over T of 2^(r_T - hmin(T))), unclamped. Every subset in
/// `rates` must have an hmin entry.
double lhl_bound(const RateVector& rates, const std::map<SubsetMask, double>& hmin);

/// log2(|X_T| + 3) * sqrt((2 / nbar) * (L + log2(1 / eps))), the per-symbol
/// min-entropy smoothing loss.
double smoothing_defect(std::uint64_t nbar, std::uint64_t alphabet_size_t, unsigned num_users,
                        double eps);

/// Same quantity with log2(1/eps) given directly, for eps below double range.
double smoothing_defect_log(std::uint64_t nbar, std::uint64_t alphabet_size_t,
                            unsigned num_users, double log2_inv_eps);

/// v * log2(|X| / v), 0 -> 0. The upper bound on I(X;Y) in terms of the
/// variational distance v between p_XY and p_X p_Y; needs |X| >= 4.
double mi_from_distance(double v, std::uint64_t alphabet_size);

/// As above with the alphabet given as log2 |X| (>= 2), for alphabets of
/// 2^r messages with r in the thousands.
double mi_from_distance_log2(double v, double log2_alphabet_size);

} // namespace nc
