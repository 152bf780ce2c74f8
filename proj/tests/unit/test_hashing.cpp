#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "core/hashing.hpp"

using namespace nc;

namespace {

BitString bits_of(std::uint64_t v, std::size_t len) {
  std::vector<std::uint8_t> b(len);
  for (std::size_t i = 0; i < len; ++i) b[i] = (v >> (len - 1 - i)) & 1u;
  return BitString::from_bits(b);
}

// Matrix-vector product with M[i][j] = seed[i + m - 1 - j], straight from
// the definition of the family.
BitString toeplitz_ref(const BitString& seed, std::size_t m, std::size_t r, const BitString& x) {
  std::vector<std::uint8_t> out(r, 0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i] ^= seed.get(i + m - 1 - j) & x.get(j);
  return BitString::from_bits(out);
}

} // namespace

TEST_CASE("bit strings") {
  std::vector<std::uint8_t> b{1, 0, 1, 1, 0};
  BitString s = BitString::from_bits(b);
  CHECK(s.to_hex() == "b0");
  CHECK(s.to_binary() == "10110");
  CHECK(BitString::from_hex("b0", 5) == s);
  CHECK_THROWS(BitString::from_hex("b4", 5));
  CHECK(s.popcount() == 3);
  Rng rng(9);
  for (std::size_t len : {0, 1, 63, 64, 65, 200}) {
    BitString r = BitString::random(len, rng);
    CHECK(BitString::from_hex(r.to_hex(), len) == r);
    CHECK((r ^ r).popcount() == 0);
  }
}

TEST_CASE("draw") {
  Rng a(3), b(3);
  CHECK(draw(a, 20, 5) == draw(b, 20, 5));
  CHECK(LinearHash::seed_len(3, 1) == 3);
  CHECK_THROWS_AS(draw(a, 3, 4), std::invalid_argument);

  // m = 3, r = 1: all 8 seeds define distinct maps.
  std::set<std::string> tables;
  for (std::uint64_t s = 0; s < 8; ++s) {
    LinearHash h(3, 1, bits_of(s, 3));
    std::string t;
    for (std::uint64_t x = 0; x < 8; ++x) t += h.eval(bits_of(x, 3)).to_binary();
    tables.insert(t);
  }
  CHECK(tables.size() == 8);

  const std::size_t trials = 100000, len = LinearHash::seed_len(8, 4);
  std::vector<std::size_t> ones(len, 0);
  Rng rng(77);
  for (std::size_t t = 0; t < trials; ++t) {
    LinearHash h = draw(rng, 8, 4);
    for (std::size_t i = 0; i < len; ++i) ones[i] += h.seed().get(i);
  }
  for (std::size_t i = 0; i < len; ++i) {
    CHECK(std::abs(static_cast<double>(ones[i]) / trials - 0.5) <= 3 * std::sqrt(0.25 / trials));
  }
}

TEST_CASE("evaluation") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 1 + rng.below(300), r = 1 + rng.below(m);
    LinearHash h = draw(rng, m, r);
    CHECK(h.eval(BitString(m)).popcount() == 0);
    BitString x = BitString::random(m, rng), y = BitString::random(m, rng);
    CHECK(h.eval(x ^ y) == (h.eval(x) ^ h.eval(y)));
    CHECK(h.eval(x) == toeplitz_ref(h.seed(), m, r, x));
  }
  LinearHash h = draw(rng, 10, 3);
  CHECK_THROWS_AS(h.eval(BitString(9)), std::invalid_argument);
  LinearHash empty;
  CHECK(empty.eval(BitString(0)).size() == 0);
}

TEST_CASE("two-universality, exhaustive for m <= 8, r <= 4") {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t r = 1; r <= std::min<std::size_t>(4, m); ++r) {
      const std::size_t seeds = std::size_t{1} << LinearHash::seed_len(m, r);
      const std::size_t inputs = std::size_t{1} << m;
      std::vector<std::vector<std::uint64_t>> out(seeds, std::vector<std::uint64_t>(inputs));
      for (std::size_t s = 0; s < seeds; ++s) {
        BitString seed = bits_of(s, LinearHash::seed_len(m, r));
        LinearHash h(m, r, seed);
        for (std::size_t x = 0; x < inputs; ++x) {
          BitString y = h.eval(bits_of(x, m));
          CHECK(y == toeplitz_ref(seed, m, r, bits_of(x, m)));
          out[s][x] = y.words().empty() ? 0 : y.words()[0];
        }
      }
      std::size_t worst = 0;
      for (std::size_t x = 0; x < inputs; ++x)
        for (std::size_t x2 = x + 1; x2 < inputs; ++x2) {
          std::size_t coll = 0;
          for (std::size_t s = 0; s < seeds; ++s) coll += out[s][x] == out[s][x2];
          worst = std::max(worst, coll);
        }
      // worst / seeds <= 2^-r, in integers.
      CHECK((worst << r) <= seeds);
    }
  }
}

TEST_CASE("symbol codec") {
  SymbolCodec two(2);
  std::vector<std::size_t> bits{1, 0, 1, 1};
  CHECK(two.width() == 1);
  CHECK(two.encode(bits).to_binary() == "1011");

  SymbolCodec three(3);
  std::vector<std::size_t> s{2, 0, 1};
  CHECK(three.encode(s).to_binary() == "100001");
  CHECK(three.decode(three.encode(s)) == s);
  std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(three.encode(bad), std::out_of_range);

  CHECK(SymbolCodec(1).width() == 1);
  CHECK(SymbolCodec(5).width() == 3);
  CHECK(SymbolCodec(8).width() == 3);

  Rng rng(8);
  for (std::size_t a : {1, 2, 3, 4, 7, 16, 1000}) {
    SymbolCodec c(a);
    std::vector<std::size_t> seq(137);
    for (auto& v : seq) v = rng.below(a);
    BitString e = c.encode(seq);
    CHECK(e.size() == seq.size() * c.width());
    CHECK(c.decode(e) == seq);
  }
}
