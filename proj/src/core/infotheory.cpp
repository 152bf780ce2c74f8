#include "core/infotheory.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nc {

namespace {

// 0 log 0 = 0.
double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void check_entries(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw std::invalid_argument(std::string(what) + ": entries must be finite and non-negative");
    }
  }
}

} // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw std::invalid_argument("Pmf: alphabet must be nonempty");
  }
  check_entries(probs_, "Pmf");
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("Pmf: total mass " + std::to_string(total) + " is not 1");
  }
  for (double& p : probs_) {
    p /= total;
  }
}

Pmf Pmf::uniform(std::size_t size) {
  if (size == 0) {
    throw std::invalid_argument("Pmf::uniform: size must be positive");
  }
  return Pmf(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

Pmf Pmf::point_mass(std::size_t size, std::size_t index) {
  if (index >= size) {
    throw std::invalid_argument("Pmf::point_mass: index out of range");
  }
  std::vector<double> v(size, 0.0);
  v[index] = 1.0;
  return Pmf(std::move(v));
}

JointPmf::JointPmf(std::size_t rows, std::size_t cols, std::vector<double> values,
                   bool subnormalized)
    : rows_(rows), cols_(cols), values_(std::move(values)), subnormalized_(subnormalized) {
  if (rows_ == 0 || cols_ == 0 || values_.size() != rows_ * cols_) {
    throw std::invalid_argument("JointPmf: shape does not match value count");
  }
  check_entries(values_, "JointPmf");
  const double total = total_mass();
  if (subnormalized_) {
    if (total > 1.0 + kMassTolerance) {
      throw std::invalid_argument("JointPmf: subnormalized mass exceeds 1");
    }
  } else {
    if (std::abs(total - 1.0) > kMassTolerance) {
      throw std::invalid_argument("JointPmf: total mass " + std::to_string(total) + " is not 1");
    }
    for (double& v : values_) {
      v /= total;
    }
  }
}

JointPmf JointPmf::from_conditional(const Pmf& px, std::size_t cols,
                                    std::span<const double> row_major_channel) {
  if (row_major_channel.size() != px.size() * cols) {
    throw std::invalid_argument("JointPmf::from_conditional: dimension mismatch");
  }
  std::vector<double> v(row_major_channel.size());
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (std::size_t z = 0; z < cols; ++z) {
      v[x * cols + z] = px[x] * row_major_channel[x * cols + z];
    }
  }
  return JointPmf(px.size(), cols, std::move(v));
}

JointPmf JointPmf::product(const Pmf& px, const Pmf& pz) {
  std::vector<double> v(px.size() * pz.size());
  for (std::size_t x = 0; x < px.size(); ++x) {
    for (std::size_t z = 0; z < pz.size(); ++z) {
      v[x * pz.size() + z] = px[x] * pz[z];
    }
  }
  return JointPmf(px.size(), pz.size(), std::move(v));
}

double JointPmf::total_mass() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

Pmf JointPmf::row_marginal() const {
  if (subnormalized_) {
    throw std::invalid_argument("JointPmf::row_marginal: subnormalized joint");
  }
  std::vector<double> m(rows_, 0.0);
  for (std::size_t x = 0; x < rows_; ++x) {
    for (std::size_t z = 0; z < cols_; ++z) {
      m[x] += (*this)(x, z);
    }
  }
  return Pmf(std::move(m));
}

Pmf JointPmf::col_marginal() const {
  if (subnormalized_) {
    throw std::invalid_argument("JointPmf::col_marginal: subnormalized joint");
  }
  std::vector<double> m(cols_, 0.0);
  for (std::size_t x = 0; x < rows_; ++x) {
    for (std::size_t z = 0; z < cols_; ++z) {
      m[z] += (*this)(x, z);
    }
  }
  return Pmf(std::move(m));
}

Pmf JointPmf::flatten() const {
  if (subnormalized_) {
    throw std::invalid_argument("JointPmf::flatten: subnormalized joint");
  }
  return Pmf(values_);
}

RateVector RateVector::from_user_rates(std::span<const double> per_user) {
  if (per_user.empty() || per_user.size() > 31) {
    throw std::invalid_argument("RateVector: between 1 and 31 users supported");
  }
  std::map<SubsetMask, double> m;
  const SubsetMask full = (SubsetMask{1} << per_user.size()) - 1;
  for (SubsetMask t = 1; t <= full; ++t) {
    double sum = 0.0;
    for (std::size_t l = 0; l < per_user.size(); ++l) {
      if (t & (SubsetMask{1} << l)) {
        sum += per_user[l];
      }
    }
    m.emplace(t, sum);
  }
  return RateVector(std::move(m));
}

double RateVector::at(SubsetMask t) const {
  auto it = by_subset_.find(t);
  if (it == by_subset_.end()) {
    throw std::out_of_range("RateVector: subset not present");
  }
  return it->second;
}

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    h -= plogp(v);
  }
  return h;
}

double conditional_entropy(const JointPmf& joint) {
  if (joint.subnormalized()) {
    throw std::invalid_argument("conditional_entropy: subnormalized joint");
  }
  double hxz = 0.0;
  for (double v : joint.values()) {
    hxz -= plogp(v);
  }
  const double h = hxz - entropy(joint.col_marginal());
  // Cancellation can leave a result a few ulps below zero.
  return h < 0.0 ? 0.0 : h;
}

double mutual_information(const JointPmf& joint) {
  const double i = entropy(joint.row_marginal()) - conditional_entropy(joint);
  return i < 0.0 ? 0.0 : i;
}

double variational_distance(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("variational_distance: alphabet mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += std::abs(p[i] - q[i]);
  }
  return 0.5 * s;
}

double conditional_min_entropy(const JointPmf& w, const Pmf& qz) {
  if (qz.size() != w.cols()) {
    throw std::invalid_argument("conditional_min_entropy: Z alphabet mismatch");
  }
  bool any_support = false;
  double best = 0.0;
  for (std::size_t z = 0; z < w.cols(); ++z) {
    double zmass = 0.0;
    for (std::size_t x = 0; x < w.rows(); ++x) {
      zmass += w(x, z);
    }
    if (qz[z] <= 0.0) {
      if (zmass > 0.0) {
        throw std::invalid_argument(
            "conditional_min_entropy: supp(qz) does not cover the Z-marginal of w");
      }
      continue;
    }
    any_support = true;
    for (std::size_t x = 0; x < w.rows(); ++x) {
      best = std::max(best, w(x, z) / qz[z]);
    }
  }
  if (!any_support) {
    throw std::invalid_argument("conditional_min_entropy: qz has empty support");
  }
  if (best <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return -std::log2(best);
}

double lhl_bound(const RateVector& rates, const std::map<SubsetMask, double>& hmin) {
  double sum = 0.0;
  for (const auto& [t, r] : rates.by_subset()) {
    if (t == 0) {
      continue;
    }
    auto it = hmin.find(t);
    if (it == hmin.end()) {
      throw std::invalid_argument("lhl_bound: missing min-entropy for a subset");
    }
    sum += std::exp2(r - it->second);
  }
  return std::sqrt(sum);
}

double smoothing_defect(std::uint64_t nbar, std::uint64_t alphabet_size_t, unsigned num_users,
                        double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("smoothing_defect: eps must lie in (0, 1)");
  }
  return smoothing_defect_log(nbar, alphabet_size_t, num_users, -std::log2(eps));
}

double smoothing_defect_log(std::uint64_t nbar, std::uint64_t alphabet_size_t,
                            unsigned num_users, double log2_inv_eps) {
  if (nbar == 0 || alphabet_size_t == 0) {
    throw std::invalid_argument("smoothing_defect: nbar and alphabet size must be positive");
  }
  if (!(log2_inv_eps > 0.0)) {
    throw std::invalid_argument("smoothing_defect: eps must lie in (0, 1)");
  }
  const double n = static_cast<double>(nbar);
  return std::log2(static_cast<double>(alphabet_size_t) + 3.0) *
         std::sqrt((2.0 / n) * (static_cast<double>(num_users) + log2_inv_eps));
}

double mi_from_distance(double v, std::uint64_t alphabet_size) {
  if (alphabet_size < 4) {
    throw std::invalid_argument("mi_from_distance: alphabet size must be at least 4");
  }
  return mi_from_distance_log2(v, std::log2(static_cast<double>(alphabet_size)));
}

double mi_from_distance_log2(double v, double log2_alphabet_size) {
  if (!(log2_alphabet_size >= 2.0)) {
    throw std::invalid_argument("mi_from_distance: alphabet size must be at least 4");
  }
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("mi_from_distance: distance must lie in [0, 1]");
  }
  if (v == 0.0) {
    return 0.0;
  }
  return v * (log2_alphabet_size - std::log2(v));
}

} // namespace nc
