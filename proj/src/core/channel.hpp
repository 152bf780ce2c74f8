#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "core/infotheory.hpp"
#include "core/rng.hpp"

namespace nc {

using Rational = boost::multiprecision::cpp_rational;

/// Mixed-radix indexing of a product alphabet X_1 x ... x X_L. Ordering is
/// lexicographic with the first coordinate varying slowest; channel files,
/// MAC rows and broadcast outputs all use this order.
class ProductAlphabet {
public:
  explicit ProductAlphabet(std::vector<std::size_t> sizes);

  std::size_t arity() const { return sizes_.size(); }
  std::size_t size() const { return total_; }
  std::size_t size_of(std::size_t coord) const { return sizes_[coord]; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  std::size_t encode(std::span<const std::size_t> symbols) const;
  std::vector<std::size_t> decode(std::size_t index) const;
  /// Coordinate `coord` of the symbol with flat index `index`.
  std::size_t component(std::size_t index, std::size_t coord) const;

private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t total_;
};

/// Discrete memoryless channel W: rows W_x are distributions over outputs.
/// Optionally carries the exact rational entries it was built from.
class Dmc {
public:
  Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> rows);
  /// Exact construction: every row must sum to exactly 1.
  Dmc(std::size_t input_size, std::size_t output_size, std::vector<Rational> rows);

  static Dmc identity(std::size_t size);

  std::size_t input_size() const { return input_size_; }
  std::size_t output_size() const { return output_size_; }
  double operator()(std::size_t x, std::size_t y) const { return rows_[x * output_size_ + y]; }
  std::span<const double> row(std::size_t x) const;
  std::span<const double> rows() const { return rows_; }

  bool is_exact() const { return exact_.has_value(); }
  const std::vector<Rational>& exact_rows() const { return *exact_; }

  friend bool operator==(const Dmc& a, const Dmc& b) {
    return a.input_size_ == b.input_size_ && a.output_size_ == b.output_size_ &&
           a.rows_ == b.rows_;
  }

private:
  std::size_t input_size_;
  std::size_t output_size_;
  std::vector<double> rows_;
  std::optional<std::vector<Rational>> exact_;
};

/// Multiple-access channel p(y | x_1, ..., x_L), stored as a Dmc over the
/// flattened product input alphabet.
class MacChannel {
public:
  MacChannel(std::vector<std::size_t> input_sizes, Dmc flat);

  std::size_t num_users() const { return inputs_.arity(); }
  const ProductAlphabet& inputs() const { return inputs_; }
  std::size_t output_size() const { return flat_.output_size(); }
  const Dmc& flat() const { return flat_; }

private:
  ProductAlphabet inputs_;
  Dmc flat_;
};

/// Broadcast channel p(y_1, ..., y_B | x), stored as a Dmc onto the
/// flattened product output alphabet.
class BroadcastChannel {
public:
  BroadcastChannel(std::vector<std::size_t> output_sizes, Dmc joint);

  /// Outputs conditionally independent given the input.
  static BroadcastChannel product(std::span<const Dmc> components);

  std::size_t num_receivers() const { return outputs_.arity(); }
  std::size_t input_size() const { return joint_.input_size(); }
  const ProductAlphabet& outputs() const { return outputs_; }
  const Dmc& joint() const { return joint_; }

private:
  ProductAlphabet outputs_;
  Dmc joint_;
};

struct RedundancyWitness {
  std::size_t input = 0;       ///< x whose row is (nearly) a mixture of the others
  std::vector<double> mixing;  ///< p over the whole input alphabet, p(x) = 0
};

struct RedundancyReport {
  bool non_redundant = true;
  /// min over x and p with p(x) = 0 of ||W_x - W o p||_1; +inf when |X| = 1.
  double margin_eta = std::numeric_limits<double>::infinity();
  std::optional<RedundancyWitness> witness;
};

/// Margins at or below this are classified redundant.
inline constexpr double kRedundancyMargin = 1e-7;
/// Singular values at or below this count as zero in the floating rank.
inline constexpr double kRankThreshold = 1e-9;

/// Output law sum_x p(x) W_x.
Pmf push_forward(const Dmc& w, const Pmf& p);

/// One channel use on input x.
std::size_t sample(const Dmc& w, std::size_t x, Rng& rng);

/// True iff p -> W o p is injective on the simplex: the matrix [W | 1] has
/// full row rank. Exact rational elimination when the channel carries
/// rationals, SVD otherwise.
bool injectivity_check(const Dmc& w);

/// Solves, for each x, min_{p : p(x)=0} ||W_x - W o p||_1 as a linear
/// program; the channel is non-redundant when the smallest optimum exceeds
/// kRedundancyMargin.
RedundancyReport non_redundancy_check(const Dmc& w);

/// For |X| <= 3 both checks must agree; throws std::logic_error if they do
/// not and std::invalid_argument for larger alphabets.
bool small_alphabet_consistency(const Dmc& w);

RedundancyReport mac_non_redundancy(const MacChannel& m);

/// Channel to receiver b (0-based), marginalizing the other outputs.
Dmc marginal(std::size_t b, const BroadcastChannel& bc);

} // namespace nc
