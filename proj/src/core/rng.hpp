#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace nc {

/// Deterministic pseudorandom stream. Every sampling routine takes one
/// explicitly; there is no global generator anywhere in the library.
///
/// Conversions to doubles and bounded integers are done here rather than
/// through <random> distributions, whose output is implementation-defined,
/// so transcripts replay bit-identically across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  /// Stream derived from (master, index, role). Used for per-trial and
  /// per-party randomness.
  static Rng derive(std::uint64_t master, std::uint64_t index, std::uint64_t role);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  bool coin() { return (engine_() >> 63) != 0; }
  /// Index drawn from the probability vector `probs` by inverse CDF.
  std::size_t categorical(std::span<const double> probs);

private:
  std::mt19937_64 engine_;
};

/// Stream roles used when deriving per-party randomness.
enum class Role : std::uint64_t {
  Coalition = 1,
  Channel = 2,
  Verifier = 3,
  Attacker = 4,
  Coin = 5,
  Bidder = 100, // + bidder index
  VerifierB = 200, // + verifier index (broadcast)
  Message = 300, // + bidder index, test messages in experiments
};

inline std::uint64_t role_id(Role r, std::uint64_t offset = 0) {
  return static_cast<std::uint64_t>(r) + offset;
}

} // namespace nc
