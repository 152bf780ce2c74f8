#include "core/hashing.hpp"

#include <bit>
#include <stdexcept>

namespace nc {

namespace {
std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }
} // namespace

BitString::BitString(std::size_t length) : words_(word_count(length), 0), length_(length) {}

BitString BitString::from_bits(std::span<const std::uint8_t> bits) {
  BitString b(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      throw std::invalid_argument("BitString::from_bits: entries must be 0 or 1");
    }
    b.set(i, bits[i] != 0);
  }
  return b;
}

BitString BitString::random(std::size_t length, Rng& rng) {
  BitString b(length);
  for (auto& w : b.words_) {
    w = rng.next_u64();
  }
  if (length % 64 != 0 && !b.words_.empty()) {
    b.words_.back() &= (std::uint64_t{1} << (length % 64)) - 1;
  }
  return b;
}

BitString BitString::from_hex(std::string_view hex, std::size_t length) {
  if (hex.size() != (length + 3) / 4) {
    throw std::invalid_argument("BitString::from_hex: hex length does not match bit length");
  }
  BitString b(length);
  for (std::size_t d = 0; d < hex.size(); ++d) {
    const char c = hex[d];
    unsigned v;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw std::invalid_argument("BitString::from_hex: invalid hex digit");
    }
    for (unsigned k = 0; k < 4; ++k) {
      const std::size_t i = d * 4 + k;
      const bool bit = (v >> (3 - k)) & 1u;
      if (i < length) {
        b.set(i, bit);
      } else if (bit) {
        throw std::invalid_argument("BitString::from_hex: nonzero padding bits");
      }
    }
  }
  return b;
}

void BitString::set(std::size_t i, bool v) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (v) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t BitString::popcount() const {
  std::size_t n = 0;
  for (auto w : words_) {
    n += static_cast<std::size_t>(std::popcount(w));
  }
  return n;
}

std::uint64_t BitString::window(std::size_t offset) const {
  const std::size_t w = offset >> 6;
  const unsigned shift = offset & 63;
  if (w >= words_.size()) {
    return 0;
  }
  std::uint64_t v = words_[w] >> shift;
  if (shift != 0 && w + 1 < words_.size()) {
    v |= words_[w + 1] << (64 - shift);
  }
  return v;
}

BitString BitString::reversed() const {
  BitString r(length_);
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) {
      r.set(length_ - 1 - i, true);
    }
  }
  return r;
}

std::string BitString::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve((length_ + 3) / 4);
  for (std::size_t d = 0; d * 4 < length_; ++d) {
    unsigned v = 0;
    for (unsigned k = 0; k < 4; ++k) {
      const std::size_t i = d * 4 + k;
      v = (v << 1) | ((i < length_ && get(i)) ? 1u : 0u);
    }
    s.push_back(digits[v]);
  }
  return s;
}

std::string BitString::to_binary() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) {
      s[i] = '1';
    }
  }
  return s;
}

BitString& BitString::operator^=(const BitString& other) {
  if (other.length_ != length_) {
    throw std::invalid_argument("BitString: XOR of strings with different lengths");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    words_[i] ^= other.words_[i];
  }
  return *this;
}

LinearHash::LinearHash(std::size_t input_len, std::size_t output_len, BitString seed)
    : m_(input_len), r_(output_len), seed_(std::move(seed)) {
  if (r_ > m_) {
    throw std::invalid_argument("LinearHash: output length exceeds input length");
  }
  if (seed_.size() != seed_len(m_, r_)) {
    throw std::invalid_argument("LinearHash: seed must have m + r - 1 bits");
  }
}

BitString LinearHash::eval(const BitString& x) const {
  if (x.size() != m_) {
    throw std::invalid_argument("LinearHash::eval: input length mismatch");
  }
  BitString out(r_);
  if (r_ == 0) {
    return out;
  }
  // out_i = XOR_k s[i + k] & xr[k] with xr the reversed input.
  const BitString xr = x.reversed();
  const auto xw = xr.words();
  for (std::size_t i = 0; i < r_; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < xw.size(); ++w) {
      acc ^= seed_.window(i + 64 * w) & xw[w];
    }
    if (std::popcount(acc) & 1) {
      out.set(i, true);
    }
  }
  return out;
}

LinearHash draw(Rng& rng, std::size_t input_len, std::size_t output_len) {
  if (output_len > input_len) {
    throw std::invalid_argument("draw: output length exceeds input length");
  }
  return LinearHash(input_len, output_len,
                    BitString::random(LinearHash::seed_len(input_len, output_len), rng));
}

SymbolCodec::SymbolCodec(std::size_t alphabet_size) : alphabet_size_(alphabet_size), width_(1) {
  if (alphabet_size_ == 0) {
    throw std::invalid_argument("SymbolCodec: alphabet must be nonempty");
  }
  while ((std::size_t{1} << width_) < alphabet_size_) {
    ++width_;
  }
}

BitString SymbolCodec::encode(std::span<const std::size_t> symbols) const {
  BitString b(symbols.size() * width_);
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    if (symbols[k] >= alphabet_size_) {
      throw std::out_of_range("SymbolCodec::encode: symbol out of range");
    }
    for (std::size_t j = 0; j < width_; ++j) {
      if ((symbols[k] >> (width_ - 1 - j)) & 1u) {
        b.set(k * width_ + j, true);
      }
    }
  }
  return b;
}

std::vector<std::size_t> SymbolCodec::decode(const BitString& bits) const {
  if (bits.size() % width_ != 0) {
    throw std::invalid_argument("SymbolCodec::decode: length is not a multiple of the width");
  }
  std::vector<std::size_t> out(bits.size() / width_);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::size_t v = 0;
    for (std::size_t j = 0; j < width_; ++j) {
      v = (v << 1) | (bits.get(k * width_ + j) ? 1u : 0u);
    }
    if (v >= alphabet_size_) {
      throw std::out_of_range("SymbolCodec::decode: codeword outside the alphabet");
    }
    out[k] = v;
  }
  return out;
}

} // namespace nc
