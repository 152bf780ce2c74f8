#pragma once

// Commit/reveal for L bidders over a multiple-access channel.
//
// Commit: the bidders send X_l^n through the channel and the verifier sees
// Y^n; the verifier draws a challenge hash G_l for each bidder; bidder l
// picks a challenge set S_l of floor(mu n) positions and sends S_l and
// T_l = G_l(X_l[S_l]); with U the union of all S_l, bidder l draws an
// extractor F_l and sends F_l and E_l = a_l xor F_l(X_l[U^c]).
//
// Reveal: bidder l sends X_l^n and a_l; the verifier checks (i) typicality
// of the claimed inputs with Y^n, (ii) T_l against the claimed challenge
// symbols and (iii) a_l against E_l and the claimed retained symbols.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/capacity.hpp"
#include "core/channel.hpp"
#include "core/hashing.hpp"
#include "core/infotheory.hpp"
#include "core/rng.hpp"

namespace nc {

struct ProtocolParams {
  std::size_t n = 0;
  double mu = 0.1;
  double eta = 0.02;
  /// Typicality tolerance for reveal test (i); must be positive.
  double eps = 0.0;
  /// Security level s in bits used for rate selection.
  unsigned security = 40;
  /// Per-bidder pad lengths r_l in bits.
  std::vector<std::size_t> rates;

  /// |S_l| = floor(mu n).
  std::size_t challenge_size() const;
  /// Output length floor(eta n) of each challenge hash.
  std::size_t challenge_hash_len() const;

  /// 0 < eta < mu < 1, n >= 1, eps > 0, floor(eta n) >= 1. Throws
  /// std::invalid_argument naming the violated condition.
  void validate() const;
};

/// Seeds of one protocol run. Each party's randomness is derived from
/// (master, run) and its role, so runs are reproducible and independent.
struct RunSeed {
  std::uint64_t master = 0;
  std::uint64_t run = 0;

  Rng stream(Role role, std::uint64_t offset = 0) const {
    return Rng::derive(master, run, role_id(role, offset));
  }
};

struct RateSelection {
  std::vector<std::size_t> per_user;
  /// Worst-case retained length n - min(n, L floor(mu n)).
  std::size_t nbar = 0;
  /// Upper limit on r_T for every nonempty T:
  /// nbar H(X_T|Y) - nbar delta_T(nbar) - 2s, smoothing at eps = 2^-(s+2).
  std::map<SubsetMask, double> budget;
  /// Non-empty when every budget is negative and all rates are zero.
  std::string diagnostic;
};

/// Largest integer per-user rates with r_T <= budget(T) for every T: one
/// bit at a time, round robin over users in index order, until no user can
/// grow. The smoothing and hashing terms then satisfy
/// 2 eps + lhl_bound <= 2^L 2^-s.
RateSelection select_rates(const MacChannel& m, const InputDistribution& p, std::size_t n,
                           double mu, unsigned security);

/// Public description of one commitment instance.
struct MacScheme {
  MacChannel channel;
  InputDistribution input;
  CollusionMode mode = CollusionMode::Colluding;
  ProtocolParams params;

  /// Reveal test (i) reference law: q_{X_L Y} in colluding mode, q_{X_l Y}
  /// for bidder l in non-colluding mode.
  JointPmf reference(std::optional<std::size_t> bidder = std::nullopt) const;

  /// Full validation: parameter invariants, product input in
  /// non-colluding mode, one rate per bidder and rates within the
  /// select_rates budgets.
  void validate() const;
};

/// Everything the verifier holds after the commit phase.
struct VerifierView {
  std::vector<std::size_t> y;
  std::vector<LinearHash> g;
  std::vector<std::vector<std::size_t>> s;  ///< sorted challenge positions per bidder
  std::vector<BitString> t;
  std::vector<LinearHash> f;
  std::vector<BitString> e;

  /// Sorted complement of the union of challenge sets.
  std::vector<std::size_t> retained() const;
  friend bool operator==(const VerifierView&, const VerifierView&) = default;
};

struct BidderState {
  BitString a;
  std::vector<std::size_t> x;
  std::vector<std::size_t> s;
  std::vector<std::size_t> retained_symbols;
  LinearHash f;
};

struct RevealClaim {
  std::vector<std::vector<std::size_t>> x;
  std::vector<BitString> a;
};

struct CommitResult {
  std::vector<BidderState> bidders;
  VerifierView view;

  /// The honest opening.
  RevealClaim honest_claim() const;
};

/// Runs the commit phase. `messages[l]` must have params.rates[l] bits.
CommitResult commit_mac(const MacScheme& scheme, const std::vector<BitString>& messages,
                        const RunSeed& seed);

struct BidderVerdict {
  bool typical = false;    ///< test (i)
  bool challenge = false;  ///< test (ii)
  bool pad = false;        ///< test (iii)
  bool accepted() const { return typical && challenge && pad; }
};

struct RevealOutcome {
  std::vector<BidderVerdict> bidders;
  bool all_accepted() const;
};

/// Reveal-phase tests. Throws std::invalid_argument on malformed claims
/// (wrong lengths or symbols outside the alphabets).
RevealOutcome reveal_mac(const MacScheme& scheme, const VerifierView& view,
                         const RevealClaim& claim);

/// Symbols of `x` at the listed positions.
std::vector<std::size_t> gather(const std::vector<std::size_t>& x,
                                const std::vector<std::size_t>& positions);

/// Default typicality tolerance eps(n) = c n^(-1/3), with c set from the
/// 99.9% quantile of the honest max-cell deviation over `samples` Monte Carlo
/// draws of length n (the same statistic test (i) thresholds).
struct EpsCalibration {
  double c = 0.0;
  double eps = 0.0;
};
EpsCalibration calibrate_eps(const MacChannel& m, const InputDistribution& p, CollusionMode mode,
                             std::size_t n, std::uint64_t seed, std::size_t samples = 5000);

/// Sampling of i.i.d. channel inputs for all bidders: one joint draw per
/// position from the coalition stream when colluding, per-bidder draws from
/// each bidder's own stream otherwise.
std::vector<std::vector<std::size_t>> sample_inputs(const MacScheme& scheme, const RunSeed& seed);

/// Y^n for the given per-bidder inputs.
std::vector<std::size_t> transmit(const MacChannel& m, const std::vector<std::vector<std::size_t>>& x,
                                  Rng& rng);

} // namespace nc
