#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "core/infotheory.hpp"
#include "oracles.hpp"

using namespace nc;

namespace {

const std::vector<double> kW1 = {0.25, 0.75, 0.5, 0.5};

JointPmf random_joint(std::mt19937_64& g, std::size_t rows, std::size_t cols) {
  return JointPmf(rows, cols, oracle::random_pmf(g, rows * cols));
}

} // namespace

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({1.2, -0.2}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({NAN, 1.0}), std::invalid_argument);
  Pmf drift({0.5, 0.5 + 1e-13});
  CHECK(drift[0] + drift[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(JointPmf(2, 2, {0.5, 0.5, 0.5, 0.5}), std::invalid_argument);
  JointPmf sub(2, 2, {0.1, 0.2, 0.0, 0.3}, true);
  CHECK(sub.total_mass() == doctest::Approx(0.6));
  CHECK_THROWS_AS(JointPmf(1, 2, {0.6, 0.6}, true), std::invalid_argument);
}

TEST_CASE("entropy examples") {
  CHECK(entropy(Pmf::uniform(2)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entropy(Pmf::point_mass(5, 3)) == 0.0);
  const double ref = oracle::entropy({0.375, 0.625});
  CHECK(entropy(Pmf({0.375, 0.625})) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(ref == doctest::Approx(0.954434).epsilon(1e-6));
}

TEST_CASE("entropy is concave") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 2 + i % 6;
    auto p = oracle::random_pmf(g, k);
    auto q = oracle::random_pmf(g, k);
    const double lam = u(g);
    std::vector<double> mix(k);
    for (std::size_t j = 0; j < k; ++j) mix[j] = lam * p[j] + (1 - lam) * q[j];
    CHECK(entropy(Pmf(mix)) >= lam * entropy(Pmf(p)) + (1 - lam) * entropy(Pmf(q)) - 1e-9);
  }
}

TEST_CASE("conditional entropy examples") {
  auto j = JointPmf::from_conditional(Pmf::uniform(2), 2, kW1);
  const double ref = oracle::equivocation({0.5, 0.5}, kW1, 2);
  CHECK(conditional_entropy(j) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(ref == doctest::Approx(0.95120).epsilon(1e-5));

  Pmf px({0.2, 0.3, 0.5});
  CHECK(conditional_entropy(JointPmf::product(px, Pmf({0.4, 0.6}))) ==
        doctest::Approx(entropy(px)).epsilon(1e-13));

  std::vector<double> copy = {0.2, 0, 0, 0, 0.3, 0, 0, 0, 0.5};
  CHECK(conditional_entropy(JointPmf(3, 3, copy)) == doctest::Approx(0.0).epsilon(1e-15));

  CHECK_THROWS_AS(conditional_entropy(JointPmf(1, 2, {0.1, 0.2}, true)), std::invalid_argument);
}

TEST_CASE("conditional entropy is bounded by the marginal entropy") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 1000; ++i) {
    auto j = random_joint(g, 2 + i % 4, 2 + i % 3);
    const double h = conditional_entropy(j);
    CHECK(h >= -1e-12);
    CHECK(h <= entropy(j.row_marginal()) + 1e-12);
    std::vector<double> v(j.values().begin(), j.values().end());
    CHECK(h == doctest::Approx(oracle::conditional_entropy(v, j.rows(), j.cols())).epsilon(1e-12));
  }
}

TEST_CASE("variational distance") {
  Pmf p({0.5, 0.5});
  CHECK(variational_distance(p, p) == 0.0);
  CHECK(variational_distance(Pmf({1, 0, 0}), Pmf({0, 0.5, 0.5})) == 1.0);
  CHECK(variational_distance(p, Pmf({0.25, 0.75})) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(variational_distance(p, Pmf::uniform(3)), std::invalid_argument);

  std::mt19937_64 g(3);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 2 + i % 7;
    Pmf a(oracle::random_pmf(g, k)), b(oracle::random_pmf(g, k)), c(oracle::random_pmf(g, k));
    CHECK(variational_distance(a, b) == variational_distance(b, a));
    CHECK(variational_distance(a, c) <= variational_distance(a, b) + variational_distance(b, c) + 1e-12);
  }
}

TEST_CASE("conditional min-entropy") {
  // m-bit uniform X independent of Z.
  const std::size_t m = 3;
  JointPmf indep = JointPmf::product(Pmf::uniform(1u << m), Pmf({0.3, 0.7}));
  CHECK(conditional_min_entropy(indep, Pmf({0.3, 0.7})) == doctest::Approx(3.0).epsilon(1e-13));

  JointPmf copy(2, 2, {0.4, 0, 0, 0.6});
  CHECK(conditional_min_entropy(copy, Pmf({0.4, 0.6})) == doctest::Approx(0.0).epsilon(1e-13));

  // Two uses of W1 with uniform inputs: max over the 16 cells of w/qz.
  std::vector<double> w(16), qz(4, 0.0);
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2)
      for (std::size_t y1 = 0; y1 < 2; ++y1)
        for (std::size_t y2 = 0; y2 < 2; ++y2) {
          const double v = 0.25 * kW1[x1 * 2 + y1] * kW1[x2 * 2 + y2];
          w[(x1 * 2 + x2) * 4 + y1 * 2 + y2] = v;
          qz[y1 * 2 + y2] += v;
        }
  double best = 0;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t z = 0; z < 4; ++z) best = std::max(best, w[x * 4 + z] / qz[z]);
  CHECK(conditional_min_entropy(JointPmf(4, 4, w), Pmf(qz)) ==
        doctest::Approx(-std::log2(best)).epsilon(1e-13));

  // Support of qz must cover the Z-marginal of w.
  CHECK_THROWS_AS(conditional_min_entropy(copy, Pmf({1.0, 0.0})), std::invalid_argument);
}

TEST_CASE("min-entropy below the guessing bound for independent Z") {
  std::mt19937_64 g(5);
  for (int i = 0; i < 500; ++i) {
    auto px = oracle::random_pmf(g, 2 + i % 5);
    auto pz = oracle::random_pmf(g, 2 + i % 3);
    JointPmf j = JointPmf::product(Pmf(px), Pmf(pz));
    const double guess = -std::log2(*std::max_element(px.begin(), px.end()));
    CHECK(conditional_min_entropy(j, Pmf(pz)) <= guess + 1e-12);
  }
}

TEST_CASE("leftover hash bound") {
  CHECK(lhl_bound(RateVector({{1, 30.0}}), {{1, 30.0}}) == 1.0);
  CHECK(lhl_bound(RateVector({{1, 10.0}}), {{1, 30.0}}) == doctest::Approx(std::ldexp(1.0, -10)).epsilon(1e-15));
  const double ref = std::sqrt(std::ldexp(1.0, -20) + std::ldexp(1.0, -20) + std::ldexp(1.0, -18));
  const double got = lhl_bound(RateVector({{1, 0.0}, {2, 0.0}, {3, 0.0}}), {{1, 20.0}, {2, 20.0}, {3, 18.0}});
  CHECK(std::abs(got - ref) <= 1e-15 * ref);
  CHECK_THROWS(lhl_bound(RateVector({{1, 1.0}}), {}));

  auto rv = RateVector::from_user_rates(std::vector<double>{3, 5});
  CHECK(rv.at(1) == 3);
  CHECK(rv.at(2) == 5);
  CHECK(rv.at(3) == 8);
}

TEST_CASE("smoothing defect") {
  const double ref = std::log2(5.0) * std::sqrt(2.0 / 1e4 * 11.0);
  CHECK(smoothing_defect(10000, 2, 1, std::ldexp(1.0, -10)) == doctest::Approx(ref).epsilon(1e-14));
  CHECK(smoothing_defect(100000000, 2, 1, 0.5) < 1e-3);
  for (std::uint64_t n : {10ull, 1000ull, 123457ull}) {
    const double a = smoothing_defect(n, 4, 2, 1e-6);
    const double b = smoothing_defect(2 * n, 4, 2, 1e-6);
    CHECK(a / b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(b < a);
  }
  CHECK(smoothing_defect_log(500, 4, 2, 42.0) ==
        doctest::Approx(smoothing_defect(500, 4, 2, std::ldexp(1.0, -42))).epsilon(1e-14));
  CHECK_THROWS_AS(smoothing_defect(10, 2, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(smoothing_defect(10, 2, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(smoothing_defect(0, 2, 1, 0.5), std::invalid_argument);
}

TEST_CASE("distance to mutual information bound") {
  CHECK(mi_from_distance(0.0, 4) == 0.0);
  CHECK(mi_from_distance(1.0, 4) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(mi_from_distance(0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(mi_from_distance(1.5, 8), std::invalid_argument);
  CHECK(mi_from_distance_log2(0.25, 10.0) == doctest::Approx(mi_from_distance(0.25, 1024)).epsilon(1e-14));

  std::mt19937_64 g(13);
  for (int i = 0; i < 1000; ++i) {
    auto j = random_joint(g, 4, 4);
    Pmf px = j.row_marginal(), pz = j.col_marginal();
    JointPmf prod = JointPmf::product(px, pz);
    const double v = variational_distance(j.flatten(), prod.flatten());
    CHECK(mutual_information(j) <= mi_from_distance(v, 4) + 1e-12);
  }
}
