#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/rng.hpp"

namespace nc {

/// Fixed-length bit string. Bit 0 is the first (most significant) bit of
/// the string; hex serialization is most-significant-bit first and pads the
/// final nibble with zeros.
class BitString {
public:
  BitString() = default;
  explicit BitString(std::size_t length);

  static BitString from_bits(std::span<const std::uint8_t> bits);
  static BitString random(std::size_t length, Rng& rng);
  static BitString from_hex(std::string_view hex, std::size_t length);

  std::size_t size() const { return length_; }
  bool empty() const { return length_ == 0; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  std::size_t popcount() const;

  /// The 64 bits starting at `offset`, bit k of the result being bit
  /// offset + k of the string; positions past the end read as zero.
  std::uint64_t window(std::size_t offset) const;
  std::span<const std::uint64_t> words() const { return words_; }

  BitString reversed() const;
  std::string to_hex() const;
  std::string to_binary() const;

  BitString& operator^=(const BitString& other);
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
  friend bool operator==(const BitString&, const BitString&) = default;

private:
  std::vector<std::uint64_t> words_;
  std::size_t length_ = 0;
};

/// Member of the Toeplitz family of GF(2)-linear maps {0,1}^m -> {0,1}^r.
/// The seed s has m + r - 1 bits and the matrix entry in row i, column j is
/// s[i + m - 1 - j]. Over a uniform seed, any two distinct inputs collide
/// with probability exactly 2^-r.
///
/// r = 0 is allowed as the degenerate family with an empty seed and empty
/// output; it is used for zero-rate commitments.
class LinearHash {
public:
  /// The empty map {0,1}^0 -> {0,1}^0.
  LinearHash() = default;
  LinearHash(std::size_t input_len, std::size_t output_len, BitString seed);

  std::size_t input_len() const { return m_; }
  std::size_t output_len() const { return r_; }
  const BitString& seed() const { return seed_; }

  BitString eval(const BitString& x) const;

  static std::size_t seed_len(std::size_t input_len, std::size_t output_len) {
    return output_len == 0 ? 0 : input_len + output_len - 1;
  }

  friend bool operator==(const LinearHash&, const LinearHash&) = default;

private:
  std::size_t m_ = 0;
  std::size_t r_ = 0;
  BitString seed_;
};

/// Uniformly random member of the family; requires r <= m.
LinearHash draw(Rng& rng, std::size_t input_len, std::size_t output_len);

/// Fixed-width big-endian encoding of symbols from an alphabet of the given
/// size. Width is ceil(log2 size), with a minimum of one bit so that unary
/// alphabets still produce a non-empty hash domain.
class SymbolCodec {
public:
  explicit SymbolCodec(std::size_t alphabet_size);

  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t width() const { return width_; }

  BitString encode(std::span<const std::size_t> symbols) const;
  std::vector<std::size_t> decode(const BitString& bits) const;

private:
  std::size_t alphabet_size_;
  std::size_t width_;
};

} // namespace nc
