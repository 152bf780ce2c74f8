#include "core/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "core/lp.hpp"

namespace nc {

ProductAlphabet::ProductAlphabet(std::vector<std::size_t> sizes)
    : sizes_(std::move(sizes)), strides_(sizes_.size(), 1), total_(1) {
  if (sizes_.empty()) {
    throw std::invalid_argument("ProductAlphabet: need at least one coordinate");
  }
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    if (sizes_[i] == 0) {
      throw std::invalid_argument("ProductAlphabet: alphabet sizes must be positive");
    }
    strides_[i] = total_;
    total_ *= sizes_[i];
  }
}

std::size_t ProductAlphabet::encode(std::span<const std::size_t> symbols) const {
  if (symbols.size() != sizes_.size()) {
    throw std::invalid_argument("ProductAlphabet::encode: arity mismatch");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= sizes_[i]) {
      throw std::out_of_range("ProductAlphabet::encode: symbol out of range");
    }
    idx += symbols[i] * strides_[i];
  }
  return idx;
}

std::vector<std::size_t> ProductAlphabet::decode(std::size_t index) const {
  if (index >= total_) {
    throw std::out_of_range("ProductAlphabet::decode: index out of range");
  }
  std::vector<std::size_t> s(sizes_.size());
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    s[i] = (index / strides_[i]) % sizes_[i];
  }
  return s;
}

std::size_t ProductAlphabet::component(std::size_t index, std::size_t coord) const {
  return (index / strides_[coord]) % sizes_[coord];
}

Dmc::Dmc(std::size_t input_size, std::size_t output_size, std::vector<double> rows)
    : input_size_(input_size), output_size_(output_size), rows_(std::move(rows)) {
  if (input_size_ == 0 || output_size_ == 0) {
    throw std::invalid_argument("Dmc: alphabet sizes must be positive");
  }
  if (rows_.size() != input_size_ * output_size_) {
    throw std::invalid_argument("Dmc: row data does not match dimensions");
  }
  for (std::size_t x = 0; x < input_size_; ++x) {
    auto first = rows_.begin() + static_cast<std::ptrdiff_t>(x * output_size_);
    std::vector<double> r(first, first + static_cast<std::ptrdiff_t>(output_size_));
    try {
      Pmf normalized(std::move(r));
      std::copy(normalized.probs().begin(), normalized.probs().end(), first);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("Dmc: row " + std::to_string(x) + ": " + e.what());
    }
  }
}

Dmc::Dmc(std::size_t input_size, std::size_t output_size, std::vector<Rational> rows)
    : input_size_(input_size), output_size_(output_size) {
  if (input_size_ == 0 || output_size_ == 0) {
    throw std::invalid_argument("Dmc: alphabet sizes must be positive");
  }
  if (rows.size() != input_size_ * output_size_) {
    throw std::invalid_argument("Dmc: row data does not match dimensions");
  }
  rows_.reserve(rows.size());
  for (std::size_t x = 0; x < input_size_; ++x) {
    Rational total = 0;
    for (std::size_t y = 0; y < output_size_; ++y) {
      const Rational& v = rows[x * output_size_ + y];
      if (v < 0) {
        throw std::invalid_argument("Dmc: row " + std::to_string(x) + ": negative entry");
      }
      total += v;
      rows_.push_back(v.convert_to<double>());
    }
    if (total != 1) {
      throw std::invalid_argument("Dmc: row " + std::to_string(x) + ": sums to " + total.str() +
                                  ", not exactly 1");
    }
  }
  exact_ = std::move(rows);
}

Dmc Dmc::identity(std::size_t size) {
  std::vector<Rational> rows(size * size, Rational(0));
  for (std::size_t i = 0; i < size; ++i) {
    rows[i * size + i] = 1;
  }
  return Dmc(size, size, std::move(rows));
}

std::span<const double> Dmc::row(std::size_t x) const {
  if (x >= input_size_) {
    throw std::out_of_range("Dmc::row: input symbol out of range");
  }
  return std::span<const double>(rows_).subspan(x * output_size_, output_size_);
}

MacChannel::MacChannel(std::vector<std::size_t> input_sizes, Dmc flat)
    : inputs_(std::move(input_sizes)), flat_(std::move(flat)) {
  if (inputs_.size() != flat_.input_size()) {
    throw std::invalid_argument("MacChannel: product input alphabet does not match row count");
  }
}

BroadcastChannel::BroadcastChannel(std::vector<std::size_t> output_sizes, Dmc joint)
    : outputs_(std::move(output_sizes)), joint_(std::move(joint)) {
  if (outputs_.size() != joint_.output_size()) {
    throw std::invalid_argument(
        "BroadcastChannel: product output alphabet does not match row width");
  }
}

BroadcastChannel BroadcastChannel::product(std::span<const Dmc> components) {
  if (components.empty()) {
    throw std::invalid_argument("BroadcastChannel::product: need at least one component");
  }
  const std::size_t nx = components.front().input_size();
  std::vector<std::size_t> sizes;
  bool exact = true;
  for (const Dmc& c : components) {
    if (c.input_size() != nx) {
      throw std::invalid_argument("BroadcastChannel::product: input alphabets differ");
    }
    sizes.push_back(c.output_size());
    exact = exact && c.is_exact();
  }
  ProductAlphabet out(sizes);
  if (exact) {
    std::vector<Rational> rows(nx * out.size());
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < out.size(); ++y) {
        Rational v = 1;
        for (std::size_t b = 0; b < components.size(); ++b) {
          v *= components[b].exact_rows()[x * sizes[b] + out.component(y, b)];
        }
        rows[x * out.size() + y] = v;
      }
    }
    return BroadcastChannel(sizes, Dmc(nx, out.size(), std::move(rows)));
  }
  std::vector<double> rows(nx * out.size());
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < out.size(); ++y) {
      double v = 1.0;
      for (std::size_t b = 0; b < components.size(); ++b) {
        v *= components[b](x, out.component(y, b));
      }
      rows[x * out.size() + y] = v;
    }
  }
  return BroadcastChannel(sizes, Dmc(nx, out.size(), std::move(rows)));
}

Pmf push_forward(const Dmc& w, const Pmf& p) {
  if (p.size() != w.input_size()) {
    throw std::invalid_argument("push_forward: input distribution has wrong alphabet size");
  }
  std::vector<double> out(w.output_size(), 0.0);
  for (std::size_t x = 0; x < w.input_size(); ++x) {
    if (p[x] == 0.0) {
      continue;
    }
    for (std::size_t y = 0; y < w.output_size(); ++y) {
      out[y] += p[x] * w(x, y);
    }
  }
  return Pmf(std::move(out));
}

std::size_t sample(const Dmc& w, std::size_t x, Rng& rng) {
  return rng.categorical(w.row(x));
}

namespace {

std::size_t exact_rank(std::vector<Rational> m, std::size_t rows, std::size_t cols) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot * cols + c] == 0) {
      ++pivot;
    }
    if (pivot == rows) {
      continue;
    }
    for (std::size_t k = 0; k < cols; ++k) {
      std::swap(m[pivot * cols + k], m[rank * cols + k]);
    }
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r * cols + c] == 0) {
        continue;
      }
      const Rational f = m[r * cols + c] / m[rank * cols + c];
      for (std::size_t k = c; k < cols; ++k) {
        m[r * cols + k] -= f * m[rank * cols + k];
      }
    }
    ++rank;
  }
  return rank;
}

} // namespace

bool injectivity_check(const Dmc& w) {
  const std::size_t rows = w.input_size();
  const std::size_t cols = w.output_size() + 1;
  if (w.is_exact()) {
    std::vector<Rational> m(rows * cols);
    for (std::size_t x = 0; x < rows; ++x) {
      for (std::size_t y = 0; y + 1 < cols; ++y) {
        m[x * cols + y] = w.exact_rows()[x * w.output_size() + y];
      }
      m[x * cols + cols - 1] = 1;
    }
    return exact_rank(std::move(m), rows, cols) == rows;
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y + 1 < cols; ++y) {
      m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = w(x, y);
    }
    m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(cols - 1)) = 1.0;
  }
  if (rows > cols) {
    return false;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > kRankThreshold) {
      ++rank;
    }
  }
  return rank == rows;
}

namespace {

// min_{p over X \ {x}} ||W_x - W o p||_1 in standard form:
//   sum_{x'} p_x' W_x'(y) + u_y - v_y = W_x(y)   for each y
//   sum_{x'} p_x' = 1
// minimizing sum_y (u_y + v_y) with p, u, v >= 0.
std::pair<double, std::vector<double>> closest_mixture(const Dmc& w, std::size_t x) {
  const std::size_t nx = w.input_size();
  const std::size_t ny = w.output_size();
  const std::size_t k = nx - 1;
  const std::size_t nvars = k + 2 * ny;
  lp::Problem prob;
  prob.a.assign((ny + 1) * nvars, 0.0);
  prob.b.assign(ny + 1, 0.0);
  prob.c.assign(nvars, 0.0);
  for (std::size_t y = 0; y < ny; ++y) {
    std::size_t col = 0;
    for (std::size_t other = 0; other < nx; ++other) {
      if (other == x) {
        continue;
      }
      prob.a[y * nvars + col++] = w(other, y);
    }
    prob.a[y * nvars + k + y] = 1.0;
    prob.a[y * nvars + k + ny + y] = -1.0;
    prob.b[y] = w(x, y);
  }
  for (std::size_t col = 0; col < k; ++col) {
    prob.a[ny * nvars + col] = 1.0;
  }
  prob.b[ny] = 1.0;
  for (std::size_t j = k; j < nvars; ++j) {
    prob.c[j] = 1.0;
  }
  const lp::Solution sol = lp::solve(prob, 1e-9);
  if (sol.status != lp::Status::Optimal) {
    throw std::logic_error("non_redundancy_check: mixture LP did not reach an optimum");
  }
  std::vector<double> mixing(nx, 0.0);
  std::size_t col = 0;
  double total = 0.0;
  for (std::size_t other = 0; other < nx; ++other) {
    if (other == x) {
      continue;
    }
    mixing[other] = sol.x[col++];
    total += mixing[other];
  }
  for (double& v : mixing) {
    v /= total;
  }
  // Recompute the distance from the returned mixture rather than trusting
  // the tableau objective.
  double dist = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double mix = 0.0;
    for (std::size_t other = 0; other < nx; ++other) {
      mix += mixing[other] * w(other, y);
    }
    dist += std::abs(w(x, y) - mix);
  }
  return {dist, std::move(mixing)};
}

} // namespace

RedundancyReport non_redundancy_check(const Dmc& w) {
  RedundancyReport report;
  if (w.input_size() == 1) {
    return report; // the quantifier ranges over an empty set
  }
  std::size_t worst = 0;
  std::vector<double> worst_mixing;
  for (std::size_t x = 0; x < w.input_size(); ++x) {
    auto [dist, mixing] = closest_mixture(w, x);
    if (dist < report.margin_eta) {
      report.margin_eta = dist;
      worst = x;
      worst_mixing = std::move(mixing);
    }
  }
  report.non_redundant = report.margin_eta > kRedundancyMargin;
  if (!report.non_redundant) {
    report.witness = RedundancyWitness{worst, std::move(worst_mixing)};
  }
  return report;
}

bool small_alphabet_consistency(const Dmc& w) {
  if (w.input_size() > 3) {
    throw std::invalid_argument(
        "small_alphabet_consistency: the equivalence only holds for at most three inputs");
  }
  const bool injective = injectivity_check(w);
  const bool non_redundant = non_redundancy_check(w).non_redundant;
  if (injective != non_redundant) {
    throw std::logic_error("small_alphabet_consistency: injectivity and non-redundancy disagree");
  }
  return injective;
}

RedundancyReport mac_non_redundancy(const MacChannel& m) {
  return non_redundancy_check(m.flat());
}

Dmc marginal(std::size_t b, const BroadcastChannel& bc) {
  if (b >= bc.num_receivers()) {
    throw std::out_of_range("marginal: receiver index out of range");
  }
  const std::size_t nx = bc.input_size();
  const std::size_t nyb = bc.outputs().size_of(b);
  const Dmc& j = bc.joint();
  if (j.is_exact()) {
    std::vector<Rational> rows(nx * nyb, Rational(0));
    for (std::size_t x = 0; x < nx; ++x) {
      for (std::size_t y = 0; y < bc.outputs().size(); ++y) {
        rows[x * nyb + bc.outputs().component(y, b)] += j.exact_rows()[x * j.output_size() + y];
      }
    }
    return Dmc(nx, nyb, std::move(rows));
  }
  std::vector<double> rows(nx * nyb, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < bc.outputs().size(); ++y) {
      rows[x * nyb + bc.outputs().component(y, b)] += j(x, y);
    }
  }
  return Dmc(nx, nyb, std::move(rows));
}

} // namespace nc
