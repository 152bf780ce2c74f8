#pragma once

// Reference computations for the tests, written directly from the textbook
// definitions and independent of the library's own formulas.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline std::string data(const std::string& name) { return std::string(NC_DATA_DIR) + "/" + name; }

inline long double log2l_(long double v) { return std::log2(v); }

inline double entropy(const std::vector<double>& p) {
  long double h = 0;
  for (double v : p) {
    if (v > 0) h -= v * log2l_(v);
  }
  return static_cast<double>(h);
}

// H(X|Z) = sum p(x,z) log p(z)/p(x,z), joint given row-major with X on rows.
inline double conditional_entropy(const std::vector<double>& joint, std::size_t rows,
                                  std::size_t cols) {
  std::vector<long double> pz(cols, 0);
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t z = 0; z < cols; ++z) pz[z] += joint[x * cols + z];
  long double h = 0;
  for (std::size_t x = 0; x < rows; ++x)
    for (std::size_t z = 0; z < cols; ++z) {
      long double v = joint[x * cols + z];
      if (v > 0) h += v * log2l_(pz[z] / v);
    }
  return static_cast<double>(h);
}

// p(x) W(z|x).
inline std::vector<double> joint_of(const std::vector<double>& px, const std::vector<double>& w,
                                    std::size_t cols) {
  std::vector<double> j(px.size() * cols);
  for (std::size_t x = 0; x < px.size(); ++x)
    for (std::size_t z = 0; z < cols; ++z) j[x * cols + z] = px[x] * w[x * cols + z];
  return j;
}

// H(X|Y) for input px through the row-stochastic w.
inline double equivocation(const std::vector<double>& px, const std::vector<double>& w,
                           std::size_t cols) {
  return conditional_entropy(joint_of(px, w, cols), px.size(), cols);
}

inline std::vector<double> random_pmf(std::mt19937_64& g, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(k);
  double s = 0;
  for (auto& v : p) {
    v = e(g);
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

inline std::vector<double> random_stochastic(std::mt19937_64& g, std::size_t rows,
                                             std::size_t cols) {
  std::vector<double> w;
  for (std::size_t x = 0; x < rows; ++x) {
    auto r = random_pmf(g, cols);
    w.insert(w.end(), r.begin(), r.end());
  }
  return w;
}

// Compositions of `steps` into `parts` non-negative integers, as a grid on
// the simplex with step 1/steps.
inline void simplex_grid(std::size_t parts, std::size_t steps,
                         const std::function<void(const std::vector<double>&)>& visit) {
  std::vector<std::size_t> c(parts, 0);
  std::vector<double> p(parts);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == parts) {
      c[i] = left;
      for (std::size_t k = 0; k < parts; ++k) p[k] = static_cast<double>(c[k]) / steps;
      visit(p);
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      c[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, steps);
}

} // namespace oracle
