#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "core/channel.hpp"
#include "core/channel_io.hpp"
#include "oracles.hpp"

using namespace nc;

namespace {

Dmc w1() { return Dmc(2, 2, std::vector<double>{0.25, 0.75, 0.5, 0.5}); }

Dmc load_dmc(const std::string& name) { return as_dmc(load_channel_spec(oracle::data(name))); }

double l1_to_mixture(const Dmc& w, std::size_t x, const std::vector<double>& p) {
  double d = 0;
  for (std::size_t y = 0; y < w.output_size(); ++y) {
    double mix = 0;
    for (std::size_t k = 0; k < w.input_size(); ++k) mix += p[k] * w(k, y);
    d += std::abs(w(x, y) - mix);
  }
  return d;
}

// min over grid p with p(x) = 0 of ||W_x - W o p||_1, minimized over x.
double grid_margin(const Dmc& w, std::size_t steps) {
  double best = INFINITY;
  const std::size_t k = w.input_size();
  for (std::size_t x = 0; x < k; ++x) {
    oracle::simplex_grid(k - 1, steps, [&](const std::vector<double>& q) {
      std::vector<double> p;
      for (std::size_t i = 0, j = 0; i < k; ++i) p.push_back(i == x ? 0.0 : q[j++]);
      best = std::min(best, l1_to_mixture(w, x, p));
    });
  }
  return best;
}

} // namespace

TEST_CASE("push forward") {
  Pmf out = push_forward(w1(), Pmf({1, 0}));
  CHECK(out[0] == 0.25);
  CHECK(out[1] == 0.75);
  Pmf p({0.1, 0.2, 0.7});
  CHECK(push_forward(Dmc::identity(3), p) == p);

  Dmc w5 = load_dmc("three_output_noninjective.json");
  Pmf a = push_forward(w5, Pmf({0.5, 0, 0, 0.5}));
  Pmf b = push_forward(w5, Pmf({0, 0.5, 0.5, 0}));
  CHECK(a == Pmf({0.5, 0.25, 0.25}));
  CHECK(b == Pmf({0.5, 0.25, 0.25}));
  CHECK_THROWS_AS(push_forward(w5, Pmf::uniform(3)), std::invalid_argument);
}

TEST_CASE("push forward is affine") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const std::size_t r = 2 + i % 4, c = 2 + i % 3;
    Dmc w(r, c, oracle::random_stochastic(g, r, c));
    auto p = oracle::random_pmf(g, r), q = oracle::random_pmf(g, r);
    const double lam = u(g);
    std::vector<double> mix(r);
    for (std::size_t k = 0; k < r; ++k) mix[k] = lam * p[k] + (1 - lam) * q[k];
    Pmf lhs = push_forward(w, Pmf(mix));
    Pmf wp = push_forward(w, Pmf(p)), wq = push_forward(w, Pmf(q));
    for (std::size_t y = 0; y < c; ++y) CHECK(std::abs(lhs[y] - (lam * wp[y] + (1 - lam) * wq[y])) <= 1e-12);
  }
}

TEST_CASE("sampling") {
  Dmc det(2, 3, std::vector<double>{0, 1, 0, 0, 0, 1});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(sample(det, 0, rng) == 1);

  Rng a(42), b(42);
  const Dmc w = w1();
  std::size_t zeros = 0;
  const std::size_t trials = 100000;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t s = sample(w, 0, a);
    CHECK(s == sample(w, 0, b));
    zeros += s == 0;
  }
  const double freq = static_cast<double>(zeros) / trials;
  CHECK(std::abs(freq - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / trials));
  CHECK_THROWS_AS(sample(w, 2, a), std::out_of_range);
}

TEST_CASE("injectivity") {
  CHECK(injectivity_check(w1()));
  CHECK_FALSE(injectivity_check(load_dmc("three_output_noninjective.json")));
  CHECK(injectivity_check(Dmc::identity(4)));
  CHECK(injectivity_check(load_dmc("w1.json")));
}

TEST_CASE("non-redundancy examples") {
  auto r5 = non_redundancy_check(load_dmc("three_output_noninjective.json"));
  CHECK(r5.non_redundant);
  CHECK(r5.margin_eta > kRedundancyMargin);
  CHECK_FALSE(r5.witness);

  CHECK(non_redundancy_check(load_dmc("w1.json")).non_redundant);
  CHECK(non_redundancy_check(load_dmc("w2.json")).non_redundant);

  Dmc mid(3, 2, std::vector<double>{1, 0, 0, 1, 0.5, 0.5});
  auto r = non_redundancy_check(mid);
  CHECK_FALSE(r.non_redundant);
  REQUIRE(r.witness);
  CHECK(r.witness->input == 2);
  CHECK(r.witness->mixing[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.witness->mixing[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.witness->mixing[2] == 0.0);

  auto one = non_redundancy_check(Dmc(1, 2, std::vector<double>{0.5, 0.5}));
  CHECK(one.non_redundant);
  CHECK(std::isinf(one.margin_eta));
}

TEST_CASE("redundant witness reproduces the row") {
  // The four-input MAC with three identical rows is redundant.
  auto spec = load_channel_spec(oracle::data("mac_and.json"));
  auto r = mac_non_redundancy(as_mac(spec));
  CHECK_FALSE(r.non_redundant);
  REQUIRE(r.witness);
  CHECK(r.witness->mixing[r.witness->input] == 0.0);
  CHECK(l1_to_mixture(spec.flat, r.witness->input, r.witness->mixing) <= 1e-9);
}

TEST_CASE("small alphabets: injectivity and non-redundancy agree") {
  CHECK(small_alphabet_consistency(w1()));
  CHECK_FALSE(small_alphabet_consistency(Dmc(2, 2, std::vector<double>{0.3, 0.7, 0.3, 0.7})));
  CHECK_THROWS_AS(small_alphabet_consistency(load_dmc("three_output_noninjective.json")),
                  std::invalid_argument);
  std::size_t count = 0;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; ++b) {
      Dmc w(2, 2, std::vector<double>{a / 20.0, 1 - a / 20.0, b / 20.0, 1 - b / 20.0});
      CHECK(small_alphabet_consistency(w) == (a != b));
      ++count;
    }
  CHECK(count == 441);
}

TEST_CASE("injective channels are non-redundant") {
  std::mt19937_64 g(17);
  std::size_t injective = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t r = 2 + i % 4, c = 2 + (i / 4) % 4;
    Dmc w(r, c, oracle::random_stochastic(g, r, c));
    const bool inj = injectivity_check(w);
    const bool nr = non_redundancy_check(w).non_redundant;
    if (inj) {
      ++injective;
      CHECK(nr);
    }
    if (r <= 3) CHECK(inj == nr);
  }
  CHECK(injective > 0);
}

TEST_CASE("mac non-redundancy") {
  Dmc dup(4, 2, std::vector<double>{0.1, 0.9, 0.6, 0.4, 0.1, 0.9, 0.3, 0.7});
  CHECK_FALSE(mac_non_redundancy(MacChannel({2, 2}, dup)).non_redundant);
  CHECK(mac_non_redundancy(as_mac(load_channel_spec(oracle::data("mac_noisy_id.json")))).non_redundant);
}

TEST_CASE("margin matches grid minimization") {
  std::mt19937_64 g(23);
  for (int i = 0; i < 20; ++i) {
    Dmc w(4, 3, oracle::random_stochastic(g, 4, 3));
    const double eta = non_redundancy_check(w).margin_eta;
    const double grid = grid_margin(w, 100);
    // A grid point lies within l1 distance 3/100 of any p, which moves
    // W o p by at most that much in l1.
    CHECK(eta <= grid + 1e-9);
    CHECK(eta >= grid - 0.03);
  }
}

TEST_CASE("broadcast marginals") {
  Dmc a = w1();
  Dmc b(2, 3, std::vector<double>{0.2, 0.3, 0.5, 0.6, 0.4, 0.0});
  std::vector<Dmc> parts{a, b};
  auto bc = BroadcastChannel::product(parts);
  CHECK(marginal(0, bc) == a);
  CHECK(marginal(1, bc) == b);
  CHECK_THROWS_AS(marginal(2, bc), std::out_of_range);

  BroadcastChannel single({2}, a);
  CHECK(marginal(0, single) == a);

  std::mt19937_64 g(4);
  BroadcastChannel corr({3, 2}, Dmc(3, 6, oracle::random_stochastic(g, 3, 6)));
  for (std::size_t bi = 0; bi < 2; ++bi) {
    Dmc m = marginal(bi, corr);
    for (std::size_t x = 0; x < 3; ++x) {
      double s = 0;
      for (double v : m.row(x)) s += v;
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("product alphabet ordering") {
  ProductAlphabet pa({2, 3});
  CHECK(pa.size() == 6);
  std::vector<std::size_t> s{1, 2};
  CHECK(pa.encode(s) == 5);
  CHECK(pa.decode(3) == std::vector<std::size_t>{1, 0});
  CHECK(pa.component(4, 1) == 1);
}

TEST_CASE("channel files") {
  const std::string text = R"({
  "id": "t",
  "input_sizes": [2],
  "output_sizes": [3],
  "exact": true,
  "rows": [["1/3", "1/3", "1/3"], ["0", "2/7", "5/7"]]
})";
  auto spec = parse_channel_spec(text);
  CHECK(spec.flat.is_exact());
  CHECK(spec.flat(1, 2) == doctest::Approx(5.0 / 7.0).epsilon(1e-15));
  auto again = parse_channel_spec(serialize_channel_spec(spec));
  CHECK(again.flat.exact_rows() == spec.flat.exact_rows());
  CHECK(serialize_channel_spec(again) == serialize_channel_spec(spec));

  const std::string bad_sum = "{\n\"input_sizes\": [2],\n\"output_sizes\": [2],\n\"rows\": [[0.5, 0.6],\n[0.5, 0.5]]\n}";
  CHECK_THROWS_AS(parse_channel_spec(bad_sum), ParseError);
  try {
    parse_channel_spec("{\n\"input_sizes\": [2],\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_channel_spec(R"({"input_sizes":[2],"output_sizes":[2],"rows":[[1,0]]})"), ParseError);
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK_THROWS(parse_rational("1/0"));
}
