#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/attacks.hpp"
#include "core/channel_io.hpp"
#include "core/protocol.hpp"
#include "core/typicality.hpp"
#include "oracles.hpp"

using namespace nc;

namespace {

MacChannel load_mac(const std::string& name) { return as_mac(load_channel_spec(oracle::data(name))); }

MacScheme make_scheme(const MacChannel& m, CollusionMode mode, std::size_t n, unsigned s,
                      std::uint64_t seed = 1) {
  const auto constraint = mode == CollusionMode::Colluding ? InputConstraint::Joint : InputConstraint::Product;
  InputDistribution p = InputDistribution::uniform(m.inputs().sizes(), constraint);
  MacScheme sc{m, p, mode, ProtocolParams{}};
  sc.params.n = n;
  sc.params.security = s;
  sc.params.rates = select_rates(m, p, n, sc.params.mu, s).per_user;
  sc.params.eps = calibrate_eps(m, p, mode, n, seed, 2000).eps;
  sc.validate();
  return sc;
}

// H(X_T|Y) for the two-user AND-type MAC under uniform input, computed
// from the joint of (X_T, Y).
double and_subset_entropy(SubsetMask t) {
  const double w[4][2] = {{0.25, 0.75}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  const std::size_t rows = t == 3 ? 4 : 2;
  std::vector<double> j(rows * 2, 0.0);
  for (std::size_t x = 0; x < 4; ++x) {
    const std::size_t r = t == 1 ? x / 2 : t == 2 ? x % 2 : x;
    for (std::size_t y = 0; y < 2; ++y) j[r * 2 + y] += 0.25 * w[x][y];
  }
  return oracle::conditional_entropy(j, rows, 2);
}

std::size_t bidders_in(SubsetMask t, std::size_t users) {
  std::size_t c = 0;
  for (std::size_t l = 0; l < users; ++l) c += (t >> l) & 1u;
  return c;
}

} // namespace

TEST_CASE("parameter validation") {
  ProtocolParams p;
  p.n = 2000;
  p.eps = 0.05;
  CHECK_NOTHROW(p.validate());
  CHECK(p.challenge_size() == 200);
  CHECK(p.challenge_hash_len() == 40);
  p.eta = 0.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.eta = 0.02;
  p.eps = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.eps = 0.05;
  p.n = 10;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("rate selection") {
  MacChannel noiseless({2, 2}, Dmc::identity(4));
  auto p = InputDistribution::uniform({2, 2}, InputConstraint::Joint);
  auto z = select_rates(noiseless, p, 10000, 0.1, 40);
  CHECK(z.per_user == std::vector<std::size_t>{0, 0});
  CHECK_FALSE(z.diagnostic.empty());

  MacChannel w = load_mac("mac_and.json");
  CHECK(select_rates(w, p, 10000, 0.1, 100000).per_user == std::vector<std::size_t>{0, 0});

  const std::size_t n = 10000;
  const unsigned s = 40;
  auto sel = select_rates(w, p, n, 0.1, s);
  CHECK(sel.nbar == n - 2 * 1000);
  const double nb = static_cast<double>(sel.nbar);
  for (SubsetMask t = 1; t <= 3; ++t) {
    const double alphabet = std::pow(2.0, static_cast<double>(bidders_in(t, 2)));
    const double delta = std::log2(alphabet + 3) * std::sqrt(2.0 / nb * (2 + s + 2));
    const double budget = nb * and_subset_entropy(t) - nb * delta - 2.0 * s;
    CHECK(sel.budget.at(t) == doctest::Approx(budget).epsilon(1e-9));
    double r = 0;
    for (std::size_t l = 0; l < 2; ++l)
      if (t >> l & 1u) r += static_cast<double>(sel.per_user[l]);
    CHECK(r <= budget);
  }
  // Maximal: one more bit for any bidder breaks a constraint. Here the
  // single-bidder budgets bind, well below the sum-rate budget.
  for (std::size_t l = 0; l < 2; ++l) {
    const SubsetMask t = SubsetMask{1} << l;
    CHECK(static_cast<double>(sel.per_user[l]) + 1 > sel.budget.at(t));
  }
  CHECK(sel.per_user[0] + sel.per_user[1] + 1.0 < sel.budget.at(3));
}

TEST_CASE("zero-rate commitment") {
  MacChannel w = load_mac("mac_noisy_id.json");
  MacScheme sc = make_scheme(w, CollusionMode::Colluding, 300, 40);
  sc.params.rates = {0, 0};
  std::vector<BitString> msgs(2);
  auto c = commit_mac(sc, msgs, RunSeed{4, 0});
  CHECK(c.view.e[0].empty());
  CHECK(c.view.e[1].empty());
  CHECK(c.view.f[0].output_len() == 0);
  auto out = reveal_mac(sc, c.view, c.honest_claim());
  CHECK(out.bidders.size() == 2);
  for (const auto& v : out.bidders) {
    CHECK(v.challenge);
    CHECK(v.pad);
  }
}

TEST_CASE("commit is deterministic and well-formed") {
  MacChannel w = load_mac("mac_noisy_id.json");
  MacScheme sc = make_scheme(w, CollusionMode::Colluding, 2000, 40);
  REQUIRE(sc.params.rates[0] > 0);
  auto msgs = random_messages(sc.params.rates, RunSeed{9, 1});
  auto a = commit_mac(sc, msgs, RunSeed{9, 1});
  auto b = commit_mac(sc, msgs, RunSeed{9, 1});
  auto c = commit_mac(sc, msgs, RunSeed{9, 2});
  CHECK(a.view == b.view);
  CHECK_FALSE(a.view == c.view);

  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(a.view.s[l].size() == 200);
    CHECK(std::is_sorted(a.view.s[l].begin(), a.view.s[l].end()));
    CHECK(a.view.t[l].size() == 40);
    CHECK(a.view.e[l].size() == sc.params.rates[l]);
    // Pad correctness.
    const auto retained = gather(a.bidders[l].x, a.view.retained());
    const BitString k = a.view.f[l].eval(SymbolCodec(2).encode(retained));
    CHECK((a.view.e[l] ^ k) == msgs[l]);
  }
  CHECK(a.view.retained().size() >= 2000 - 400);

  std::vector<BitString> wrong_len{BitString(3), BitString(3)};
  CHECK_THROWS_AS(commit_mac(sc, wrong_len, RunSeed{1, 0}), std::invalid_argument);
}

TEST_CASE("honest runs on the AND-type MAC are jointly typical") {
  MacChannel w = load_mac("mac_and.json");
  MacScheme sc = make_scheme(w, CollusionMode::Colluding, 2000, 40);
  const JointPmf q = sc.reference();
  std::size_t typical = 0, accepted = 0;
  for (std::uint64_t run = 0; run < 200; ++run) {
    RunSeed seed{2024, run};
    auto c = commit_mac(sc, random_messages(sc.params.rates, seed), seed);
    std::vector<std::size_t> flat(2000);
    for (std::size_t i = 0; i < 2000; ++i) flat[i] = c.bidders[0].x[i] * 2 + c.bidders[1].x[i];
    typical += jointly_typical(flat, c.view.y, q, sc.params.eps);
    accepted += reveal_mac(sc, c.view, c.honest_claim()).all_accepted();
  }
  CHECK(typical >= 198);
  CHECK(accepted == typical);
}

TEST_CASE("reveal tests") {
  MacChannel w = load_mac("mac_noisy_id.json");
  MacScheme sc = make_scheme(w, CollusionMode::Colluding, 2000, 40);
  std::size_t challenge_rejects = 0;
  for (std::uint64_t run = 0; run < 50; ++run) {
    RunSeed seed{77, run};
    auto c = commit_mac(sc, random_messages(sc.params.rates, seed), seed);
    RevealClaim honest = c.honest_claim();
    auto ok = reveal_mac(sc, c.view, honest);
    REQUIRE(ok.all_accepted());

    RevealClaim wrong = honest;
    wrong.a[1].flip(0);
    auto bad = reveal_mac(sc, c.view, wrong);
    CHECK(bad.bidders[0].accepted());
    CHECK(bad.bidders[1].typical);
    CHECK(bad.bidders[1].challenge);
    CHECK_FALSE(bad.bidders[1].pad);

    RevealClaim flipped = honest;
    const std::size_t pos = c.view.s[0][run % c.view.s[0].size()];
    flipped.x[0][pos] ^= 1;
    auto f = reveal_mac(sc, c.view, flipped);
    challenge_rejects += !f.bidders[0].challenge;
  }
  CHECK(challenge_rejects == 50);

  RunSeed seed{1, 1};
  auto c = commit_mac(sc, random_messages(sc.params.rates, seed), seed);
  RevealClaim shortx = c.honest_claim();
  shortx.x[0].pop_back();
  CHECK_THROWS_AS(reveal_mac(sc, c.view, shortx), std::invalid_argument);
  RevealClaim badsym = c.honest_claim();
  badsym.x[1][0] = 2;
  CHECK_THROWS_AS(reveal_mac(sc, c.view, badsym), std::invalid_argument);
}

TEST_CASE("non-colluding bidders") {
  MacChannel w = load_mac("mac_noisy_id.json");
  MacScheme sc = make_scheme(w, CollusionMode::NonColluding, 2000, 40);
  std::size_t accepted = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    RunSeed seed{5, run};
    auto c = commit_mac(sc, random_messages(sc.params.rates, seed), seed);
    accepted += reveal_mac(sc, c.view, c.honest_claim()).all_accepted();
  }
  CHECK(accepted >= 98);

  MacScheme joint_input = sc;
  joint_input.input = InputDistribution::uniform({2, 2}, InputConstraint::Joint);
  CHECK_THROWS_AS(joint_input.validate(), std::invalid_argument);
}

TEST_CASE("scheme validation refuses excessive rates") {
  MacChannel w = load_mac("mac_noisy_id.json");
  MacScheme sc = make_scheme(w, CollusionMode::Colluding, 2000, 40);
  sc.params.rates[0] += 1;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.params.rates = {1};
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("pads look uniform without the channel output") {
  MacChannel w = load_mac("mac_noisy_id.json");
  MacScheme sc = make_scheme(w, CollusionMode::Colluding, 500, 0);
  REQUIRE(sc.params.rates[0] >= 8);
  REQUIRE(sc.params.rates[1] >= 8);
  const std::size_t runs = 2000;
  std::vector<std::size_t> ones(16, 0);
  for (std::uint64_t run = 0; run < runs; ++run) {
    RunSeed seed{31, run};
    auto msgs = random_messages(sc.params.rates, seed);
    auto c = commit_mac(sc, msgs, seed);
    for (std::size_t l = 0; l < 2; ++l) {
      const BitString k = c.view.e[l] ^ msgs[l];
      for (std::size_t i = 0; i < 8; ++i) ones[l * 8 + i] += k.get(i);
    }
  }
  for (std::size_t v : ones) {
    CHECK(std::abs(static_cast<double>(v) / runs - 0.5) < 3 * std::sqrt(0.25 / runs));
  }
}

TEST_CASE("eps calibration") {
  MacChannel w = load_mac("mac_and.json");
  auto p = InputDistribution::uniform({2, 2}, InputConstraint::Joint);
  auto a = calibrate_eps(w, p, CollusionMode::Colluding, 2000, 3, 1000);
  auto b = calibrate_eps(w, p, CollusionMode::Colluding, 2000, 3, 1000);
  CHECK(a.eps == b.eps);
  CHECK(a.eps > 0);
  CHECK(a.c == doctest::Approx(a.eps * std::cbrt(2000.0)).epsilon(1e-12));
}
