#pragma once

// Experiment harnesses: cheating bidders against the reveal tests, and a
// threshold distinguisher against the commit-phase view.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "core/broadcast.hpp"
#include "core/protocol.hpp"
#include "core/stats.hpp"

namespace nc {

enum class BindingStrategy {
  /// Change k retained symbols of bidder 0 and claim the message they
  /// extract to.
  FlipRetained,
  /// Change k challenged symbols of bidder 0; the extracted message stays
  /// the committed one.
  FlipChallenge,
  /// Fresh inputs for the whole block: the joint sequence when colluding,
  /// bidder 0's sequence otherwise.
  Resample,
  /// Fresh inputs at the retained positions only, challenged symbols kept.
  ResampleRetained,
  /// Honest sequence with a different message.
  WrongMessage,
};

std::string_view strategy_name(BindingStrategy s);
std::optional<BindingStrategy> parse_strategy(std::string_view name);

struct BindingConfig {
  BindingStrategy strategy = BindingStrategy::Resample;
  std::size_t k = 1;
};

struct BindingTrial {
  /// Reveal accepted a claim whose message differs from the committed one.
  bool success = false;
  /// Reveal accepted a claimed sequence different from the sent one.
  bool sequence_accepted = false;
};

struct AttackEstimate {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t sequence_successes = 0;
  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  Interval wilson() const { return wilson_interval(successes, trials); }
  Interval sequence_wilson() const { return wilson_interval(sequence_successes, trials); }
};

/// One cheating attempt against an honest commitment.
BindingTrial attempt_binding(const MacScheme& scheme, const CommitResult& commit,
                             const BindingConfig& attack, Rng& rng);
BindingTrial attempt_binding_broadcast(const BroadcastScheme& scheme, const BroadcastCommit& commit,
                                       const BindingConfig& attack, std::size_t b_star, Rng& rng);

/// Fresh honest commitment per trial (uniform random messages), then one
/// cheating attempt. Trials are independent and reproducible from `seed`.
AttackEstimate binding_attack(const MacScheme& scheme, const BindingConfig& attack,
                              std::size_t trials, std::uint64_t seed, unsigned threads = 1);

/// Uniformly random messages of the scheme's rates, from run `seed`.
std::vector<BitString> random_messages(const std::vector<std::size_t>& rates, const RunSeed& seed);

/// Analytic bound on I(A_L; V) for the scheme's rates: mutual-information bound from
/// variational distance 2 eps + lhl_bound, with smoothing eps = 2^-(s+2),
/// min-entropies nbar H(X_T|Y) - nbar delta_T(nbar), and the message
/// alphabet of 2^{r_L} values (at least 4). Zero when r_L = 0.
double certified_concealment_bound(const MacScheme& scheme);

/// d_H(Z, a') - d_H(Z, a) where Z = E xor F(xhat) and xhat is the
/// per-position MAP estimate of the inputs from Y^n; messages are
/// concatenated over bidders.
double concealment_statistic(const MacScheme& scheme, const VerifierView& view,
                             const std::vector<BitString>& a, const std::vector<BitString>& a_alt);

struct ConcealmentResult {
  double certified_bound = 0.0;
  /// |accuracy - 1/2| of the fitted threshold on the evaluation runs.
  double advantage = 0.0;
  double accuracy = 0.5;
  double threshold = 0.0;
  std::size_t trials = 0;
  /// Standard deviation of the accuracy under the null, sqrt(1/4 / (2 trials)).
  double sigma = 0.0;
};

/// Each trial commits a and a' in independent runs. A threshold on
/// concealment_statistic is fitted on trials/4 separate training pairs and
/// then scored on the `trials` evaluation pairs.
ConcealmentResult concealment_probe(const MacScheme& scheme, const std::vector<BitString>& a,
                                    const std::vector<BitString>& a_alt, std::size_t trials,
                                    std::uint64_t seed, unsigned threads = 1);

struct SimulationTrial {
  bool accepted = false;
  bool attack_success = false;
  /// concealment_statistic with a' the bitwise complement of a.
  double concealment_stat = 0.0;
};

struct SimulationSummary {
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::size_t attack_successes = 0;
  Interval acceptance;
  Interval attack;
  double mean_concealment_stat = 0.0;
};

std::vector<SimulationTrial> simulate_mac(const MacScheme& scheme, const BindingConfig& attack,
                                          std::size_t trials, std::uint64_t seed, unsigned threads);

/// Broadcast runs; reveal before `available` with b* drawn uniformly from it
/// unless fixed.
std::vector<SimulationTrial> simulate_broadcast(const BroadcastScheme& scheme,
                                                const BindingConfig& attack, std::size_t trials,
                                                std::uint64_t seed, unsigned threads,
                                                const std::vector<std::size_t>& available,
                                                std::optional<std::size_t> b_star);

SimulationSummary summarize(const std::vector<SimulationTrial>& trials);

} // namespace nc
