#pragma once

// Commit/reveal for one bidder and B verifiers over a broadcast channel.
// One input sequence is broadcast; every verifier b draws its own challenge
// hash G_b and receives T_b = G_b(X[S]) for a single shared challenge set S;
// one extractor F and pad E = a xor F(X[S^c]) serve all verifiers. At reveal
// time only the verifiers in A are still present and verifier b* in A
// adjudicates alone, against its own output Y_b*.

#include <cstddef>
#include <optional>
#include <vector>

#include "core/channel.hpp"
#include "core/hashing.hpp"
#include "core/protocol.hpp"

namespace nc {

struct BroadcastScheme {
  BroadcastChannel channel;
  Pmf input;
  /// rates holds the single pad length r.
  ProtocolParams params;

  /// q_{X Y_b} for verifier b.
  JointPmf reference(std::size_t b) const;
  void validate() const;
};

/// Largest r with r <= nbar min_b H(X|Y_b) - nbar delta(nbar) - 2s, where
/// nbar = n - floor(mu n) and delta uses L = 1 and eps = 2^-(s+2).
RateSelection select_rate_broadcast(const BroadcastChannel& bc, const Pmf& p, std::size_t n,
                                    double mu, unsigned security);

struct BroadcastView {
  std::vector<std::vector<std::size_t>> y;  ///< per verifier
  std::vector<LinearHash> g;               ///< per verifier
  std::vector<std::size_t> s;              ///< shared, sorted
  std::vector<BitString> t;                ///< per verifier
  LinearHash f;
  BitString e;

  std::vector<std::size_t> retained() const;
  friend bool operator==(const BroadcastView&, const BroadcastView&) = default;
};

struct BroadcastCommit {
  BitString a;
  std::vector<std::size_t> x;
  BroadcastView view;
};

BroadcastCommit commit_broadcast(const BroadcastScheme& scheme, const BitString& message,
                                 const RunSeed& seed);

struct BroadcastReveal {
  std::size_t b_star = 0;
  BidderVerdict verdict;
};

/// Reveal before the verifiers in `available` (0-based, nonempty). With no
/// b_star given, the adjudicator is uniform over `available`, drawn from the
/// seed's coin stream. Throws std::invalid_argument for an empty set, a
/// b_star outside it, or a malformed claim.
BroadcastReveal reveal_broadcast(const BroadcastScheme& scheme, const BroadcastView& view,
                                 const std::vector<std::size_t>& x, const BitString& a,
                                 const std::vector<std::size_t>& available,
                                 std::optional<std::size_t> b_star, const RunSeed& seed);

/// Same statistic as calibrate_eps, maximized over all verifiers' tests.
EpsCalibration calibrate_eps_broadcast(const BroadcastChannel& bc, const Pmf& p, std::size_t n,
                                       std::uint64_t seed, std::size_t samples = 5000);

} // namespace nc
