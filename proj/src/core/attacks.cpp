#include "core/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/typicality.hpp"

namespace nc {

namespace {

struct StrategyName {
  BindingStrategy strategy;
  std::string_view name;
};

constexpr StrategyName kStrategies[] = {
    {BindingStrategy::FlipRetained, "flip_retained"},
    {BindingStrategy::FlipChallenge, "flip_challenge"},
    {BindingStrategy::Resample, "resample"},
    {BindingStrategy::ResampleRetained, "resample_retained"},
    {BindingStrategy::WrongMessage, "wrong_message"},
};

// A symbol other than `current`, uniform over the rest of the alphabet.
std::size_t other_symbol(std::size_t current, std::size_t alphabet, Rng& rng) {
  if (alphabet < 2) {
    return current;
  }
  const std::size_t v = static_cast<std::size_t>(rng.below(alphabet - 1));
  return v >= current ? v + 1 : v;
}

// k distinct entries of `pool`, uniformly.
std::vector<std::size_t> pick(const std::vector<std::size_t>& pool, std::size_t k, Rng& rng) {
  std::vector<std::size_t> p = pool;
  k = std::min(k, p.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(p[i], p[i + static_cast<std::size_t>(rng.below(p.size() - i))]);
  }
  p.resize(k);
  return p;
}

BitString nonzero_random(std::size_t length, Rng& rng) {
  BitString b = BitString::random(length, rng);
  if (length > 0 && b.popcount() == 0) {
    b.set(static_cast<std::size_t>(rng.below(length)), true);
  }
  return b;
}

BitString complement(const BitString& a) {
  BitString out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.flip(i);
  }
  return out;
}

std::size_t hamming(const BitString& a, const BitString& b) { return (a ^ b).popcount(); }

BitString concat(const std::vector<BitString>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) {
    total += p.size();
  }
  BitString out(total);
  std::size_t at = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      out.set(at++, p.get(i));
    }
  }
  return out;
}

// MAP input estimate per output symbol: argmax_x p(x) W(y|x), smallest x on
// ties.
std::vector<std::size_t> map_table(const Dmc& w, const Pmf& p) {
  std::vector<std::size_t> best(w.output_size(), 0);
  for (std::size_t y = 0; y < w.output_size(); ++y) {
    double top = -1.0;
    for (std::size_t x = 0; x < w.input_size(); ++x) {
      const double v = p[x] * w(x, y);
      if (v > top) {
        top = v;
        best[y] = x;
      }
    }
  }
  return best;
}

template <class Fn>
std::vector<SimulationTrial> run_trials(std::size_t trials, unsigned threads, Fn&& fn) {
  std::vector<SimulationTrial> out(trials);
  parallel_for(trials, threads, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

} // namespace

std::string_view strategy_name(BindingStrategy s) {
  for (const auto& e : kStrategies) {
    if (e.strategy == s) {
      return e.name;
    }
  }
  return "unknown";
}

std::optional<BindingStrategy> parse_strategy(std::string_view name) {
  for (const auto& e : kStrategies) {
    if (e.name == name) {
      return e.strategy;
    }
  }
  return std::nullopt;
}

std::vector<BitString> random_messages(const std::vector<std::size_t>& rates, const RunSeed& seed) {
  std::vector<BitString> out;
  for (std::size_t l = 0; l < rates.size(); ++l) {
    Rng rng = seed.stream(Role::Message, l);
    out.push_back(BitString::random(rates[l], rng));
  }
  return out;
}

BindingTrial attempt_binding(const MacScheme& scheme, const CommitResult& commit,
                             const BindingConfig& attack, Rng& rng) {
  const ProductAlphabet& alpha = scheme.channel.inputs();
  const VerifierView& view = commit.view;
  RevealClaim claim = commit.honest_claim();
  const std::vector<std::size_t> keep = view.retained();
  const std::size_t n = scheme.params.n;

  switch (attack.strategy) {
  case BindingStrategy::FlipRetained:
  case BindingStrategy::FlipChallenge: {
    const auto& pool = attack.strategy == BindingStrategy::FlipRetained ? keep : view.s[0];
    for (std::size_t i : pick(pool, attack.k, rng)) {
      claim.x[0][i] = other_symbol(claim.x[0][i], alpha.size_of(0), rng);
    }
    break;
  }
  case BindingStrategy::Resample:
  case BindingStrategy::ResampleRetained: {
    std::vector<std::size_t> positions;
    if (attack.strategy == BindingStrategy::Resample) {
      positions.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        positions[i] = i;
      }
    } else {
      positions = keep;
    }
    if (scheme.mode == CollusionMode::Colluding) {
      for (std::size_t i : positions) {
        const std::size_t flat = rng.categorical(scheme.input.joint().probs());
        for (std::size_t l = 0; l < alpha.arity(); ++l) {
          claim.x[l][i] = alpha.component(flat, l);
        }
      }
    } else {
      const Pmf& p0 = scheme.input.factors()[0];
      for (std::size_t i : positions) {
        claim.x[0][i] = rng.categorical(p0.probs());
      }
    }
    break;
  }
  case BindingStrategy::WrongMessage:
    claim.a[0] ^= nonzero_random(claim.a[0].size(), rng);
    break;
  }

  if (attack.strategy != BindingStrategy::WrongMessage) {
    // The claim that passes the pad test for the altered sequence.
    for (std::size_t l = 0; l < alpha.arity(); ++l) {
      const SymbolCodec codec(alpha.size_of(l));
      claim.a[l] = view.e[l] ^ view.f[l].eval(codec.encode(gather(claim.x[l], keep)));
    }
  }

  const RevealOutcome outcome = reveal_mac(scheme, view, claim);
  const bool accepted = scheme.mode == CollusionMode::Colluding ? outcome.all_accepted()
                                                                 : outcome.bidders[0].accepted();
  bool message_changed = false;
  bool sequence_changed = false;
  for (std::size_t l = 0; l < alpha.arity(); ++l) {
    message_changed = message_changed || !(claim.a[l] == commit.bidders[l].a);
    sequence_changed = sequence_changed || claim.x[l] != commit.bidders[l].x;
  }
  return BindingTrial{accepted && message_changed, accepted && sequence_changed};
}

BindingTrial attempt_binding_broadcast(const BroadcastScheme& scheme, const BroadcastCommit& commit,
                                       const BindingConfig& attack, std::size_t b_star, Rng& rng) {
  const BroadcastView& view = commit.view;
  const std::size_t nx = scheme.channel.input_size();
  const std::vector<std::size_t> keep = view.retained();
  std::vector<std::size_t> x = commit.x;
  BitString a = commit.a;
  switch (attack.strategy) {
  case BindingStrategy::FlipRetained:
  case BindingStrategy::FlipChallenge: {
    const auto& pool = attack.strategy == BindingStrategy::FlipRetained ? keep : view.s;
    for (std::size_t i : pick(pool, attack.k, rng)) {
      x[i] = other_symbol(x[i], nx, rng);
    }
    break;
  }
  case BindingStrategy::Resample:
    for (std::size_t& xi : x) {
      xi = rng.categorical(scheme.input.probs());
    }
    break;
  case BindingStrategy::ResampleRetained:
    for (std::size_t i : keep) {
      x[i] = rng.categorical(scheme.input.probs());
    }
    break;
  case BindingStrategy::WrongMessage:
    a ^= nonzero_random(a.size(), rng);
    break;
  }
  if (attack.strategy != BindingStrategy::WrongMessage) {
    const SymbolCodec codec(nx);
    a = view.e ^ view.f.eval(codec.encode(gather(x, keep)));
  }
  const BroadcastReveal r =
      reveal_broadcast(scheme, view, x, a, {b_star}, b_star, RunSeed{});
  const bool accepted = r.verdict.accepted();
  return BindingTrial{accepted && !(a == commit.a), accepted && x != commit.x};
}

AttackEstimate binding_attack(const MacScheme& scheme, const BindingConfig& attack,
                              std::size_t trials, std::uint64_t seed, unsigned threads) {
  scheme.validate();
  std::vector<BindingTrial> results(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    const RunSeed rs{seed, i};
    const CommitResult c = commit_mac(scheme, random_messages(scheme.params.rates, rs), rs);
    Rng rng = rs.stream(Role::Attacker);
    results[i] = attempt_binding(scheme, c, attack, rng);
  });
  AttackEstimate est;
  est.trials = trials;
  for (const auto& r : results) {
    est.successes += r.success ? 1 : 0;
    est.sequence_successes += r.sequence_accepted ? 1 : 0;
  }
  return est;
}

double certified_concealment_bound(const MacScheme& scheme) {
  scheme.validate();
  const ProtocolParams& prm = scheme.params;
  double r_total = 0.0;
  for (std::size_t r : prm.rates) {
    r_total += static_cast<double>(r);
  }
  if (r_total == 0.0) {
    return 0.0;
  }
  const RateSelection sel =
      select_rates(scheme.channel, scheme.input, prm.n, prm.mu, prm.security);
  const double s = static_cast<double>(prm.security);
  // Each budget is hmin(T) - 2s.
  std::map<SubsetMask, double> hmin;
  for (const auto& [t, b] : sel.budget) {
    hmin[t] = b + 2.0 * s;
  }
  const RateVector rv = RateVector::from_user_rates(
      std::vector<double>(prm.rates.begin(), prm.rates.end()));
  const double v = 2.0 * std::exp2(-(s + 2.0)) + lhl_bound(rv, hmin);
  return mi_from_distance_log2(std::min(v, 1.0), std::max(2.0, r_total));
}

double concealment_statistic(const MacScheme& scheme, const VerifierView& view,
                             const std::vector<BitString>& a, const std::vector<BitString>& a_alt) {
  const ProductAlphabet& alpha = scheme.channel.inputs();
  const std::vector<std::size_t> table = map_table(scheme.channel.flat(), scheme.input.joint());
  const std::vector<std::size_t> keep = view.retained();
  std::vector<BitString> z;
  for (std::size_t l = 0; l < alpha.arity(); ++l) {
    std::vector<std::size_t> xhat;
    xhat.reserve(keep.size());
    for (std::size_t i : keep) {
      xhat.push_back(alpha.component(table[view.y[i]], l));
    }
    const SymbolCodec codec(alpha.size_of(l));
    z.push_back(view.e[l] ^ view.f[l].eval(codec.encode(xhat)));
  }
  const BitString zz = concat(z);
  return static_cast<double>(hamming(zz, concat(a_alt))) - static_cast<double>(hamming(zz, concat(a)));
}

ConcealmentResult concealment_probe(const MacScheme& scheme, const std::vector<BitString>& a,
                                    const std::vector<BitString>& a_alt, std::size_t trials,
                                    std::uint64_t seed, unsigned threads) {
  if (a.size() != a_alt.size()) {
    throw std::invalid_argument("concealment_probe: message tuples differ in size");
  }
  std::size_t total_rate = 0;
  for (std::size_t r : scheme.params.rates) {
    total_rate += r;
  }
  // With nothing committed there is only one message tuple to compare.
  if (total_rate > 0 && a == a_alt) {
    throw std::invalid_argument("concealment_probe: the two messages must differ");
  }
  ConcealmentResult out;
  out.certified_bound = certified_concealment_bound(scheme);
  out.trials = trials;
  if (trials == 0) {
    return out;
  }
  const std::size_t training = std::max<std::size_t>(1, trials / 4);
  // Runs 0 .. 2*trials-1 are scored; training runs come after them.
  auto stats_for = [&](std::size_t first_pair, std::size_t pairs) {
    std::vector<double> st(2 * pairs);
    parallel_for(2 * pairs, threads, [&](std::size_t j) {
      const RunSeed rs{seed, 2 * first_pair + j};
      const bool alt = (j % 2) == 1;
      const CommitResult c = commit_mac(scheme, alt ? a_alt : a, rs);
      st[j] = concealment_statistic(scheme, c.view, a, a_alt);
    });
    return st;
  };
  const std::vector<double> train = stats_for(trials, training);
  const std::vector<double> eval = stats_for(0, trials);

  // Guess "a" when the statistic exceeds the threshold (or falls below it,
  // if flipped). Candidates are midpoints between distinct training values.
  std::vector<double> cuts(train.begin(), train.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> candidates{cuts.front() - 1.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    candidates.push_back((cuts[i] + cuts[i + 1]) / 2.0);
  }
  auto accuracy = [](const std::vector<double>& st, double theta, bool flip) {
    std::size_t correct = 0;
    for (std::size_t j = 0; j < st.size(); ++j) {
      const bool is_a = (j % 2) == 0;
      const bool guess_a = flip ? st[j] < theta : st[j] > theta;
      correct += guess_a == is_a ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(st.size());
  };
  double best = -1.0;
  bool best_flip = false;
  for (double theta : candidates) {
    for (bool flip : {false, true}) {
      const double acc = accuracy(train, theta, flip);
      if (acc > best) {
        best = acc;
        out.threshold = theta;
        best_flip = flip;
      }
    }
  }
  out.accuracy = accuracy(eval, out.threshold, best_flip);
  out.advantage = std::abs(out.accuracy - 0.5);
  out.sigma = std::sqrt(0.25 / static_cast<double>(eval.size()));
  return out;
}

std::vector<SimulationTrial> simulate_mac(const MacScheme& scheme, const BindingConfig& attack,
                                          std::size_t trials, std::uint64_t seed, unsigned threads) {
  scheme.validate();
  return run_trials(trials, threads, [&](std::size_t i) {
    const RunSeed rs{seed, i};
    const std::vector<BitString> a = random_messages(scheme.params.rates, rs);
    const CommitResult c = commit_mac(scheme, a, rs);
    SimulationTrial t;
    t.accepted = reveal_mac(scheme, c.view, c.honest_claim()).all_accepted();
    Rng rng = rs.stream(Role::Attacker);
    t.attack_success = attempt_binding(scheme, c, attack, rng).success;
    std::vector<BitString> alt;
    for (const BitString& m : a) {
      alt.push_back(complement(m));
    }
    t.concealment_stat = concealment_statistic(scheme, c.view, a, alt);
    return t;
  });
}

std::vector<SimulationTrial> simulate_broadcast(const BroadcastScheme& scheme,
                                                const BindingConfig& attack, std::size_t trials,
                                                std::uint64_t seed, unsigned threads,
                                                const std::vector<std::size_t>& available,
                                                std::optional<std::size_t> b_star) {
  scheme.validate();
  const std::vector<std::size_t> table = map_table(scheme.channel.joint(), scheme.input);
  const ProductAlphabet& outs = scheme.channel.outputs();
  const SymbolCodec codec(scheme.channel.input_size());
  return run_trials(trials, threads, [&](std::size_t i) {
    const RunSeed rs{seed, i};
    const BitString a = random_messages(scheme.params.rates, rs)[0];
    const BroadcastCommit c = commit_broadcast(scheme, a, rs);
    SimulationTrial t;
    const BroadcastReveal r = reveal_broadcast(scheme, c.view, c.x, a, available, b_star, rs);
    t.accepted = r.verdict.accepted();
    Rng rng = rs.stream(Role::Attacker);
    t.attack_success = attempt_binding_broadcast(scheme, c, attack, r.b_star, rng).success;
    const std::vector<std::size_t> keep = c.view.retained();
    std::vector<std::size_t> xhat;
    std::vector<std::size_t> sym(outs.arity());
    for (std::size_t pos : keep) {
      for (std::size_t b = 0; b < outs.arity(); ++b) {
        sym[b] = c.view.y[b][pos];
      }
      xhat.push_back(table[outs.encode(sym)]);
    }
    const BitString z = c.view.e ^ c.view.f.eval(codec.encode(xhat));
    t.concealment_stat = static_cast<double>(hamming(z, complement(a))) -
                         static_cast<double>(hamming(z, a));
    return t;
  });
}

SimulationSummary summarize(const std::vector<SimulationTrial>& trials) {
  SimulationSummary s;
  s.trials = trials.size();
  double total = 0.0;
  for (const auto& t : trials) {
    s.accepted += t.accepted ? 1 : 0;
    s.attack_successes += t.attack_success ? 1 : 0;
    total += t.concealment_stat;
  }
  s.acceptance = wilson_interval(s.accepted, s.trials);
  s.attack = wilson_interval(s.attack_successes, s.trials);
  s.mean_concealment_stat = s.trials ? total / static_cast<double>(s.trials) : 0.0;
  return s;
}

} // namespace nc
