#include "core/broadcast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/capacity.hpp"
#include "core/typicality.hpp"

namespace nc {

JointPmf BroadcastScheme::reference(std::size_t b) const {
  const Dmc wb = marginal(b, channel);
  return JointPmf::from_conditional(input, wb.output_size(), wb.rows());
}

RateSelection select_rate_broadcast(const BroadcastChannel& bc, const Pmf& p, std::size_t n,
                                    double mu, unsigned security) {
  if (n == 0 || !(mu > 0.0 && mu < 1.0)) {
    throw std::invalid_argument("select_rate_broadcast: need n >= 1 and 0 < mu < 1");
  }
  if (p.size() != bc.input_size()) {
    throw std::invalid_argument("select_rate_broadcast: input law does not match the channel");
  }
  RateSelection out;
  out.per_user.assign(1, 0);
  const std::size_t k = static_cast<std::size_t>(std::floor(mu * static_cast<double>(n)));
  out.nbar = n - std::min(n, k);
  double h = conditional_entropy_through(marginal(0, bc), p);
  for (std::size_t b = 1; b < bc.num_receivers(); ++b) {
    h = std::min(h, conditional_entropy_through(marginal(b, bc), p));
  }
  const double s = static_cast<double>(security);
  double budget = -2.0 * s;
  if (out.nbar > 0) {
    const double nb = static_cast<double>(out.nbar);
    budget = nb * h - nb * smoothing_defect_log(out.nbar, bc.input_size(), 1, s + 2.0) - 2.0 * s;
  }
  out.budget[1] = budget;
  if (budget < 1.0) {
    out.diagnostic = "rate budget is below one bit; rate set to zero";
    return out;
  }
  out.per_user[0] = static_cast<std::size_t>(std::floor(budget));
  return out;
}

void BroadcastScheme::validate() const {
  params.validate();
  if (input.size() != channel.input_size()) {
    throw std::invalid_argument("scheme: input distribution does not match the channel");
  }
  if (params.rates.size() != 1) {
    throw std::invalid_argument("scheme: broadcast commitment has exactly one rate");
  }
  const RateSelection sel =
      select_rate_broadcast(channel, input, params.n, params.mu, params.security);
  if (static_cast<double>(params.rates[0]) > std::max(sel.budget.at(1), 0.0)) {
    throw std::invalid_argument("scheme: rate exceeds the rate-selection budget");
  }
}

std::vector<std::size_t> BroadcastView::retained() const {
  const std::size_t n = y.empty() ? 0 : y[0].size();
  std::vector<std::size_t> out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < s.size() && s[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

BroadcastCommit commit_broadcast(const BroadcastScheme& scheme, const BitString& message,
                                 const RunSeed& seed) {
  scheme.validate();
  const ProtocolParams& prm = scheme.params;
  if (message.size() != prm.rates[0]) {
    throw std::invalid_argument("commit_broadcast: message length differs from the rate");
  }
  BroadcastCommit out;
  out.a = message;
  {
    Rng rng = seed.stream(Role::Bidder);
    out.x.resize(prm.n);
    for (std::size_t& xi : out.x) {
      xi = rng.categorical(scheme.input.probs());
    }
  }
  const std::size_t nb = scheme.channel.num_receivers();
  BroadcastView& v = out.view;
  v.y.assign(nb, std::vector<std::size_t>(prm.n));
  {
    Rng rng = seed.stream(Role::Channel);
    const ProductAlphabet& outs = scheme.channel.outputs();
    for (std::size_t i = 0; i < prm.n; ++i) {
      const std::size_t joint = sample(scheme.channel.joint(), out.x[i], rng);
      for (std::size_t b = 0; b < nb; ++b) {
        v.y[b][i] = outs.component(joint, b);
      }
    }
  }
  const SymbolCodec codec(scheme.channel.input_size());
  const std::size_t k = prm.challenge_size();
  for (std::size_t b = 0; b < nb; ++b) {
    Rng rng = seed.stream(Role::VerifierB, b);
    v.g.push_back(draw(rng, codec.width() * k, prm.challenge_hash_len()));
  }
  Rng bidder = seed.stream(Role::Bidder, 50);
  {
    std::vector<std::size_t> idx(prm.n);
    for (std::size_t i = 0; i < prm.n; ++i) {
      idx[i] = i;
    }
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(idx[i], idx[i + static_cast<std::size_t>(bidder.below(prm.n - i))]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    v.s = std::move(idx);
  }
  const BitString challenged = codec.encode(gather(out.x, v.s));
  for (std::size_t b = 0; b < nb; ++b) {
    v.t.push_back(v.g[b].eval(challenged));
  }
  const BitString kept = codec.encode(gather(out.x, v.retained()));
  if (prm.rates[0] > kept.size()) {
    throw std::invalid_argument("commit_broadcast: rate exceeds the retained block length");
  }
  v.f = draw(bidder, kept.size(), prm.rates[0]);
  v.e = message ^ v.f.eval(kept);
  return out;
}

BroadcastReveal reveal_broadcast(const BroadcastScheme& scheme, const BroadcastView& view,
                                 const std::vector<std::size_t>& x, const BitString& a,
                                 const std::vector<std::size_t>& available,
                                 std::optional<std::size_t> b_star, const RunSeed& seed) {
  const std::size_t nb = scheme.channel.num_receivers();
  if (available.empty()) {
    throw std::invalid_argument("reveal_broadcast: no verifier is available");
  }
  for (std::size_t b : available) {
    if (b >= nb) {
      throw std::invalid_argument("reveal_broadcast: verifier index out of range");
    }
  }
  BroadcastReveal out;
  if (b_star) {
    if (std::find(available.begin(), available.end(), *b_star) == available.end()) {
      throw std::invalid_argument("reveal_broadcast: b* must be an available verifier");
    }
    out.b_star = *b_star;
  } else {
    Rng coin = seed.stream(Role::Coin);
    out.b_star = available[static_cast<std::size_t>(coin.below(available.size()))];
  }
  const std::size_t b = out.b_star;
  if (x.size() != view.y[b].size() || a.size() != view.e.size()) {
    throw std::invalid_argument("reveal_broadcast: claim lengths do not match the commitment");
  }
  for (std::size_t sym : x) {
    if (sym >= scheme.channel.input_size()) {
      throw std::invalid_argument("reveal_broadcast: claimed symbol outside the input alphabet");
    }
  }
  const SymbolCodec codec(scheme.channel.input_size());
  out.verdict.typical = jointly_typical(x, view.y[b], scheme.reference(b), scheme.params.eps);
  out.verdict.challenge = view.g[b].eval(codec.encode(gather(x, view.s))) == view.t[b];
  out.verdict.pad = (view.e ^ view.f.eval(codec.encode(gather(x, view.retained())))) == a;
  return out;
}

EpsCalibration calibrate_eps_broadcast(const BroadcastChannel& bc, const Pmf& p, std::size_t n,
                                       std::uint64_t seed, std::size_t samples) {
  if (n == 0 || samples == 0) {
    throw std::invalid_argument("calibrate_eps_broadcast: n and samples must be positive");
  }
  const std::size_t nb = bc.num_receivers();
  std::vector<JointPmf> refs;
  for (std::size_t b = 0; b < nb; ++b) {
    const Dmc wb = marginal(b, bc);
    refs.push_back(JointPmf::from_conditional(p, wb.output_size(), wb.rows()));
  }
  std::vector<double> stats(samples);
  std::vector<std::size_t> x(n);
  std::vector<std::vector<std::size_t>> y(nb, std::vector<std::size_t>(n));
  for (std::size_t k = 0; k < samples; ++k) {
    const RunSeed rs{seed, k};
    Rng bidder = rs.stream(Role::Bidder);
    Rng channel = rs.stream(Role::Channel);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = bidder.categorical(p.probs());
      const std::size_t joint = sample(bc.joint(), x[i], channel);
      for (std::size_t b = 0; b < nb; ++b) {
        y[b][i] = bc.outputs().component(joint, b);
      }
    }
    double worst = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      worst = std::max(worst, max_deviation(empirical_joint(x, y[b], refs[b].rows(),
                                                            refs[b].cols()),
                                            refs[b]));
    }
    stats[k] = worst;
  }
  std::sort(stats.begin(), stats.end());
  const std::size_t q = std::min(
      samples - 1,
      static_cast<std::size_t>(std::ceil(0.999 * static_cast<double>(samples))) - 1);
  EpsCalibration out;
  out.eps = stats[q] + 0.5 / static_cast<double>(n);
  out.c = out.eps * std::cbrt(static_cast<double>(n));
  return out;
}

} // namespace nc
