#include "core/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/typicality.hpp"

namespace nc {

std::size_t ProtocolParams::challenge_size() const {
  return static_cast<std::size_t>(std::floor(mu * static_cast<double>(n)));
}

std::size_t ProtocolParams::challenge_hash_len() const {
  return static_cast<std::size_t>(std::floor(eta * static_cast<double>(n)));
}

void ProtocolParams::validate() const {
  if (n == 0) {
    throw std::invalid_argument("params: n must be positive");
  }
  if (!(eta > 0.0 && eta < mu && mu < 1.0)) {
    throw std::invalid_argument("params: need 0 < eta < mu < 1");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("params: eps must be positive");
  }
  if (challenge_hash_len() == 0) {
    throw std::invalid_argument("params: floor(eta n) must be at least 1");
  }
}

namespace {

std::size_t worst_case_nbar(std::size_t n, std::size_t users, std::size_t challenge) {
  return n - std::min(n, users * challenge);
}

std::size_t subset_alphabet(const ProductAlphabet& alpha, SubsetMask t) {
  std::size_t size = 1;
  for (std::size_t l = 0; l < alpha.arity(); ++l) {
    if (t & (SubsetMask{1} << l)) {
      size *= alpha.size_of(l);
    }
  }
  return size;
}

} // namespace

RateSelection select_rates(const MacChannel& m, const InputDistribution& p, std::size_t n,
                           double mu, unsigned security) {
  if (n == 0 || !(mu > 0.0 && mu < 1.0)) {
    throw std::invalid_argument("select_rates: need n >= 1 and 0 < mu < 1");
  }
  const std::size_t users = m.num_users();
  RateSelection out;
  out.per_user.assign(users, 0);
  out.nbar = worst_case_nbar(n, users,
                             static_cast<std::size_t>(std::floor(mu * static_cast<double>(n))));
  const SetFunction f = entropy_set_function(m, p);
  const double s = static_cast<double>(security);
  bool any_positive = false;
  for (SubsetMask t = 1; t <= f.full(); ++t) {
    double b = -2.0 * s;
    if (out.nbar > 0) {
      const double nb = static_cast<double>(out.nbar);
      const double delta = smoothing_defect_log(out.nbar, subset_alphabet(m.inputs(), t),
                                                static_cast<unsigned>(users), s + 2.0);
      b = nb * f(t) - nb * delta - 2.0 * s;
    }
    out.budget[t] = b;
    any_positive = any_positive || b >= 1.0;
  }
  if (!any_positive) {
    out.diagnostic = "every rate budget is below one bit; all rates set to zero";
    return out;
  }
  auto fits = [&](const std::vector<std::size_t>& r) {
    for (const auto& [t, b] : out.budget) {
      double sum = 0.0;
      for (std::size_t l = 0; l < users; ++l) {
        if (t & (SubsetMask{1} << l)) {
          sum += static_cast<double>(r[l]);
        }
      }
      if (sum > b) {
        return false;
      }
    }
    return true;
  };
  std::vector<bool> frozen(users, false);
  std::size_t active = users;
  while (active > 0) {
    for (std::size_t l = 0; l < users; ++l) {
      if (frozen[l]) {
        continue;
      }
      ++out.per_user[l];
      if (!fits(out.per_user)) {
        --out.per_user[l];
        frozen[l] = true;
        --active;
      }
    }
  }
  return out;
}

JointPmf MacScheme::reference(std::optional<std::size_t> bidder) const {
  if (!bidder) {
    return JointPmf::from_conditional(input.joint(), channel.output_size(), channel.flat().rows());
  }
  return subset_joint(channel, input.joint(), SubsetMask{1} << *bidder);
}

void MacScheme::validate() const {
  params.validate();
  if (input.alphabet().sizes() != channel.inputs().sizes()) {
    throw std::invalid_argument("scheme: input distribution does not match the channel");
  }
  if (mode == CollusionMode::NonColluding && input.constraint() != InputConstraint::Product) {
    throw std::invalid_argument("scheme: non-colluding bidders need a product input distribution");
  }
  if (params.rates.size() != channel.num_users()) {
    throw std::invalid_argument("scheme: need one rate per bidder");
  }
  const RateSelection sel =
      select_rates(channel, input, params.n, params.mu, params.security);
  for (const auto& [t, b] : sel.budget) {
    double sum = 0.0;
    for (std::size_t l = 0; l < params.rates.size(); ++l) {
      if (t & (SubsetMask{1} << l)) {
        sum += static_cast<double>(params.rates[l]);
      }
    }
    if (sum > std::max(b, 0.0)) {
      throw std::invalid_argument("scheme: rates exceed the rate-selection budget for subset " +
                                  std::to_string(t));
    }
  }
}

std::vector<std::size_t> VerifierView::retained() const {
  std::vector<bool> used(y.size(), false);
  for (const auto& set : s) {
    for (std::size_t i : set) {
      used[i] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!used[i]) {
      out.push_back(i);
    }
  }
  return out;
}

RevealClaim CommitResult::honest_claim() const {
  RevealClaim c;
  for (const BidderState& b : bidders) {
    c.x.push_back(b.x);
    c.a.push_back(b.a);
  }
  return c;
}

std::vector<std::size_t> gather(const std::vector<std::size_t>& x,
                                const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t i : positions) {
    out.push_back(x.at(i));
  }
  return out;
}

std::vector<std::vector<std::size_t>> sample_inputs(const MacScheme& scheme, const RunSeed& seed) {
  const ProductAlphabet& alpha = scheme.channel.inputs();
  const std::size_t n = scheme.params.n;
  std::vector<std::vector<std::size_t>> x(alpha.arity(), std::vector<std::size_t>(n));
  if (scheme.mode == CollusionMode::Colluding) {
    Rng rng = seed.stream(Role::Coalition);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t flat = rng.categorical(scheme.input.joint().probs());
      for (std::size_t l = 0; l < alpha.arity(); ++l) {
        x[l][i] = alpha.component(flat, l);
      }
    }
  } else {
    for (std::size_t l = 0; l < alpha.arity(); ++l) {
      Rng rng = seed.stream(Role::Bidder, l);
      const Pmf& pl = scheme.input.factors()[l];
      for (std::size_t i = 0; i < n; ++i) {
        x[l][i] = rng.categorical(pl.probs());
      }
    }
  }
  return x;
}

namespace {

std::vector<std::size_t> flatten_inputs(const ProductAlphabet& alpha,
                                        const std::vector<std::vector<std::size_t>>& x) {
  const std::size_t n = x.empty() ? 0 : x[0].size();
  std::vector<std::size_t> flat(n);
  std::vector<std::size_t> sym(alpha.arity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < alpha.arity(); ++l) {
      sym[l] = x[l][i];
    }
    flat[i] = alpha.encode(sym);
  }
  return flat;
}

// Uniformly random k-subset of {0, ..., n-1}, sorted.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = i;
  }
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

} // namespace

std::vector<std::size_t> transmit(const MacChannel& m, const std::vector<std::vector<std::size_t>>& x,
                                  Rng& rng) {
  const std::vector<std::size_t> flat = flatten_inputs(m.inputs(), x);
  std::vector<std::size_t> y(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    y[i] = sample(m.flat(), flat[i], rng);
  }
  return y;
}

CommitResult commit_mac(const MacScheme& scheme, const std::vector<BitString>& messages,
                        const RunSeed& seed) {
  scheme.validate();
  const ProtocolParams& prm = scheme.params;
  const std::size_t users = scheme.channel.num_users();
  if (messages.size() != users) {
    throw std::invalid_argument("commit_mac: need one message per bidder");
  }
  for (std::size_t l = 0; l < users; ++l) {
    if (messages[l].size() != prm.rates[l]) {
      throw std::invalid_argument("commit_mac: message length differs from the bidder's rate");
    }
  }

  CommitResult out;
  VerifierView& v = out.view;
  const std::vector<std::vector<std::size_t>> x = sample_inputs(scheme, seed);
  {
    Rng channel_rng = seed.stream(Role::Channel);
    v.y = transmit(scheme.channel, x, channel_rng);
  }

  const std::size_t k = prm.challenge_size();
  Rng verifier_rng = seed.stream(Role::Verifier);
  std::vector<Rng> bidder_rng;
  for (std::size_t l = 0; l < users; ++l) {
    // Offset past the input-sampling stream used by non-colluding bidders.
    bidder_rng.push_back(seed.stream(Role::Bidder, 50 + l));
  }
  for (std::size_t l = 0; l < users; ++l) {
    const SymbolCodec codec(scheme.channel.inputs().size_of(l));
    v.g.push_back(draw(verifier_rng, codec.width() * k, prm.challenge_hash_len()));
  }
  for (std::size_t l = 0; l < users; ++l) {
    const SymbolCodec codec(scheme.channel.inputs().size_of(l));
    v.s.push_back(random_subset(prm.n, k, bidder_rng[l]));
    v.t.push_back(v.g[l].eval(codec.encode(gather(x[l], v.s[l]))));
  }
  const std::vector<std::size_t> keep = v.retained();
  for (std::size_t l = 0; l < users; ++l) {
    const SymbolCodec codec(scheme.channel.inputs().size_of(l));
    std::vector<std::size_t> kept = gather(x[l], keep);
    const BitString encoded = codec.encode(kept);
    if (prm.rates[l] > encoded.size()) {
      throw std::invalid_argument("commit_mac: rate exceeds the retained block length");
    }
    v.f.push_back(draw(bidder_rng[l], encoded.size(), prm.rates[l]));
    v.e.push_back(messages[l] ^ v.f[l].eval(encoded));
    out.bidders.push_back(BidderState{messages[l], x[l], v.s[l], std::move(kept), v.f[l]});
  }
  return out;
}

bool RevealOutcome::all_accepted() const {
  return std::all_of(bidders.begin(), bidders.end(),
                     [](const BidderVerdict& b) { return b.accepted(); });
}

RevealOutcome reveal_mac(const MacScheme& scheme, const VerifierView& view,
                         const RevealClaim& claim) {
  const ProductAlphabet& alpha = scheme.channel.inputs();
  const std::size_t users = alpha.arity();
  const std::size_t n = view.y.size();
  if (claim.x.size() != users || claim.a.size() != users || view.e.size() != users ||
      view.s.size() != users || view.t.size() != users || view.g.size() != users ||
      view.f.size() != users) {
    throw std::invalid_argument("reveal_mac: claim or view does not cover every bidder");
  }
  for (std::size_t l = 0; l < users; ++l) {
    if (claim.x[l].size() != n) {
      throw std::invalid_argument("reveal_mac: claimed sequence length differs from n");
    }
    if (claim.a[l].size() != view.e[l].size()) {
      throw std::invalid_argument("reveal_mac: claimed message length differs from the pad");
    }
    for (std::size_t sym : claim.x[l]) {
      if (sym >= alpha.size_of(l)) {
        throw std::invalid_argument("reveal_mac: claimed symbol outside the input alphabet");
      }
    }
  }

  RevealOutcome out;
  out.bidders.resize(users);
  const double eps = scheme.params.eps;
  if (scheme.mode == CollusionMode::Colluding) {
    const bool ok = jointly_typical(flatten_inputs(alpha, claim.x), view.y, scheme.reference(), eps);
    for (auto& b : out.bidders) {
      b.typical = ok;
    }
  } else {
    for (std::size_t l = 0; l < users; ++l) {
      out.bidders[l].typical = jointly_typical(claim.x[l], view.y, scheme.reference(l), eps);
    }
  }
  const std::vector<std::size_t> keep = view.retained();
  for (std::size_t l = 0; l < users; ++l) {
    const SymbolCodec codec(alpha.size_of(l));
    out.bidders[l].challenge = view.g[l].eval(codec.encode(gather(claim.x[l], view.s[l]))) == view.t[l];
    out.bidders[l].pad =
        (view.e[l] ^ view.f[l].eval(codec.encode(gather(claim.x[l], keep)))) == claim.a[l];
  }
  return out;
}

EpsCalibration calibrate_eps(const MacChannel& m, const InputDistribution& p, CollusionMode mode,
                             std::size_t n, std::uint64_t seed, std::size_t samples) {
  if (n == 0 || samples == 0) {
    throw std::invalid_argument("calibrate_eps: n and samples must be positive");
  }
  MacScheme probe{m, p, mode, ProtocolParams{}};
  probe.params.n = n;
  std::vector<JointPmf> refs;
  if (mode == CollusionMode::Colluding) {
    refs.push_back(probe.reference());
  } else {
    for (std::size_t l = 0; l < m.num_users(); ++l) {
      refs.push_back(probe.reference(l));
    }
  }
  std::vector<double> stats(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const RunSeed rs{seed, k};
    const auto x = sample_inputs(probe, rs);
    Rng channel_rng = rs.stream(Role::Channel);
    const auto y = transmit(m, x, channel_rng);
    double worst = 0.0;
    if (mode == CollusionMode::Colluding) {
      worst = max_deviation(empirical_joint(flatten_inputs(m.inputs(), x), y, refs[0].rows(),
                                            refs[0].cols()),
                            refs[0]);
    } else {
      for (std::size_t l = 0; l < refs.size(); ++l) {
        worst = std::max(worst, max_deviation(empirical_joint(x[l], y, refs[l].rows(),
                                                              refs[l].cols()),
                                              refs[l]));
      }
    }
    stats[k] = worst;
  }
  std::sort(stats.begin(), stats.end());
  const std::size_t q = std::min(samples - 1, static_cast<std::size_t>(
                                                  std::ceil(0.999 * static_cast<double>(samples))) -
                                                  1);
  EpsCalibration out;
  // Half a count above the quantile: the sample achieving it is accepted
  // whatever the rounding of n * eps.
  out.eps = stats[q] + 0.5 / static_cast<double>(n);
  out.c = out.eps * std::cbrt(static_cast<double>(n));
  return out;
}

} // namespace nc
