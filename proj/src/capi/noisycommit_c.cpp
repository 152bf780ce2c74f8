#include "noisycommit/noisycommit.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/attacks.hpp"
#include "core/broadcast.hpp"
#include "core/capacity.hpp"
#include "core/channel_io.hpp"
#include "core/protocol.hpp"
#include "core/stats.hpp"
#include "core/transcript.hpp"

struct nc_channel {
  nc::ChannelSpec spec;
};

struct nc_capacity {
  double value = 0.0;
  std::vector<double> argmax;
  std::vector<std::pair<std::uint32_t, double>> constraints;
  std::string warning;
};

struct nc_simulation {
  std::vector<nc::SimulationTrial> trials;
  nc::SimulationSummary summary;
  double eps = 0.0;
  std::vector<std::size_t> rates;
  double certified_bound = 0.0;
};

namespace {

thread_local std::string g_error;
thread_local std::size_t g_error_line = 0;

nc_status fail(nc_status s, const std::string& msg, std::size_t line = 0) {
  g_error = msg;
  g_error_line = line;
  return s;
}

template <class Fn>
nc_status guarded(Fn&& fn) {
  g_error.clear();
  g_error_line = 0;
  try {
    fn();
    return NC_OK;
  } catch (const nc::ParseError& e) {
    return fail(NC_ERR_PARSE, e.what(), e.line());
  } catch (const std::invalid_argument& e) {
    return fail(NC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(NC_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(NC_ERR_DOMAIN, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NC_ERR_INTERNAL, "out of memory");
  } catch (const std::runtime_error& e) {
    // Only file access raises a bare runtime_error in the core.
    return fail(NC_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(NC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NC_ERR_INTERNAL, "unknown failure");
  }
}

void require(bool cond, const char* msg) {
  if (!cond) {
    throw std::invalid_argument(msg);
  }
}

// Malformed transcripts are reported as parse errors, not bad arguments.
template <class Fn>
auto parsed(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw nc::ParseError(0, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

struct Resolved {
  nc::ProtocolParams params;
  unsigned threads = 1;
};

Resolved resolve_common(const nc_run_config& cfg) {
  Resolved r;
  r.params.n = cfg.n;
  r.params.mu = cfg.mu;
  r.params.eta = cfg.eta;
  r.params.eps = cfg.eps;
  r.params.security = cfg.security;
  r.threads = cfg.threads ? cfg.threads : nc::threads_from_env();
  return r;
}

// Calibration draws come from a master seed unrelated to the trial runs.
std::uint64_t calibration_seed(std::uint64_t seed) {
  return nc::Rng::derive(seed, std::numeric_limits<std::uint64_t>::max(), 7).next_u64();
}

nc::MacScheme mac_scheme(const nc_channel& ch, const nc_run_config& cfg, unsigned* threads) {
  require(cfg.mode != NC_MODE_BROADCAST, "broadcast mode needs a broadcast scheme");
  require(ch.spec.is_mac(), "colluding/product modes need a channel with a single output");
  const nc::MacChannel m = nc::as_mac(ch.spec);
  const nc::CollusionMode mode =
      cfg.mode == NC_MODE_COLLUDING ? nc::CollusionMode::Colluding : nc::CollusionMode::NonColluding;
  const nc::InputDistribution in = nc::InputDistribution::uniform(
      m.inputs().sizes(), cfg.mode == NC_MODE_COLLUDING ? nc::InputConstraint::Joint
                                                        : nc::InputConstraint::Product);
  Resolved r = resolve_common(cfg);
  // Check the ranges before the rate and eps searches touch them.
  {
    nc::ProtocolParams probe = r.params;
    probe.eps = 1.0;
    probe.validate();
  }
  if (cfg.rates) {
    r.params.rates.assign(cfg.rates, cfg.rates + cfg.num_rates);
  } else {
    r.params.rates = nc::select_rates(m, in, cfg.n, cfg.mu, cfg.security).per_user;
  }
  if (!(r.params.eps > 0.0)) {
    r.params.eps = nc::calibrate_eps(m, in, mode, cfg.n, calibration_seed(cfg.seed)).eps;
  }
  if (threads) {
    *threads = r.threads;
  }
  nc::MacScheme scheme{m, in, mode, r.params};
  scheme.validate();
  return scheme;
}

nc::BroadcastScheme broadcast_scheme(const nc_channel& ch, const nc_run_config& cfg,
                                     unsigned* threads) {
  require(ch.spec.is_broadcast(), "broadcast mode needs a channel with a single input");
  const nc::BroadcastChannel bc = nc::as_broadcast(ch.spec);
  const nc::Pmf in = nc::Pmf::uniform(bc.input_size());
  Resolved r = resolve_common(cfg);
  {
    nc::ProtocolParams probe = r.params;
    probe.eps = 1.0;
    probe.validate();
  }
  if (cfg.rates) {
    r.params.rates.assign(cfg.rates, cfg.rates + cfg.num_rates);
  } else {
    r.params.rates = nc::select_rate_broadcast(bc, in, cfg.n, cfg.mu, cfg.security).per_user;
  }
  if (!(r.params.eps > 0.0)) {
    r.params.eps = nc::calibrate_eps_broadcast(bc, in, cfg.n, calibration_seed(cfg.seed)).eps;
  }
  if (threads) {
    *threads = r.threads;
  }
  nc::BroadcastScheme scheme{bc, in, r.params};
  scheme.validate();
  return scheme;
}

std::vector<std::size_t> available_set(const nc_run_config& cfg, std::size_t receivers) {
  std::vector<std::size_t> a;
  if (cfg.available) {
    a.assign(cfg.available, cfg.available + cfg.num_available);
  } else {
    for (std::size_t b = 0; b < receivers; ++b) {
      a.push_back(b);
    }
  }
  return a;
}

std::optional<std::size_t> b_star_of(const nc_run_config& cfg) {
  if (cfg.b_star < 0) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(cfg.b_star);
}

nc::TranscriptHeader header_for(const nc_channel& ch, const nc_run_config& cfg,
                                const nc::ProtocolParams& params,
                                std::vector<std::vector<double>> input) {
  nc::TranscriptHeader h;
  h.version = NC_VERSION;
  h.channel_id = ch.spec.id;
  h.mode = nc_mode_name(cfg.mode);
  h.params = params;
  h.input_sizes = ch.spec.input_sizes;
  h.output_sizes = ch.spec.output_sizes;
  h.input = std::move(input);
  return h;
}

} // namespace

extern "C" {

const char* nc_version(void) { return NC_VERSION; }

const char* nc_status_name(nc_status status) {
  switch (status) {
  case NC_OK: return "ok";
  case NC_ERR_INVALID_ARGUMENT: return "invalid argument";
  case NC_ERR_PARSE: return "parse error";
  case NC_ERR_IO: return "i/o error";
  case NC_ERR_DOMAIN: return "domain error";
  case NC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* nc_last_error(void) { return g_error.c_str(); }
size_t nc_last_error_line(void) { return g_error_line; }
void nc_string_free(char* s) { std::free(s); }

nc_status nc_channel_load(const char* path, nc_channel** out) {
  return guarded([&] {
    require(path && out, "nc_channel_load: null argument");
    *out = new nc_channel{nc::load_channel_spec(path)};
  });
}

nc_status nc_channel_parse(const char* text, nc_channel** out) {
  return guarded([&] {
    require(text && out, "nc_channel_parse: null argument");
    *out = new nc_channel{nc::parse_channel_spec(text)};
  });
}

void nc_channel_free(nc_channel* ch) { delete ch; }

const char* nc_channel_id(const nc_channel* ch) { return ch ? ch->spec.id.c_str() : ""; }
size_t nc_channel_num_inputs(const nc_channel* ch) { return ch ? ch->spec.input_sizes.size() : 0; }
size_t nc_channel_input_size(const nc_channel* ch, size_t index) {
  return ch && index < ch->spec.input_sizes.size() ? ch->spec.input_sizes[index] : 0;
}
size_t nc_channel_num_outputs(const nc_channel* ch) { return ch ? ch->spec.output_sizes.size() : 0; }
size_t nc_channel_output_size(const nc_channel* ch, size_t index) {
  return ch && index < ch->spec.output_sizes.size() ? ch->spec.output_sizes[index] : 0;
}

nc_status nc_channel_serialize(const nc_channel* ch, char** out) {
  return guarded([&] {
    require(ch && out, "nc_channel_serialize: null argument");
    *out = dup_string(nc::serialize_channel_spec(ch->spec));
  });
}

nc_status nc_channel_check(const nc_channel* ch, nc_redundancy_report* out, double* mixing,
                           size_t capacity) {
  return guarded([&] {
    require(ch && out, "nc_channel_check: null argument");
    const nc::RedundancyReport r = nc::non_redundancy_check(ch->spec.flat);
    out->non_redundant = r.non_redundant ? 1 : 0;
    out->injective = nc::injectivity_check(ch->spec.flat) ? 1 : 0;
    out->margin = r.margin_eta;
    out->witness_input = 0;
    out->witness_size = 0;
    if (r.witness) {
      out->witness_input = r.witness->input;
      out->witness_size = r.witness->mixing.size();
      if (mixing) {
        for (std::size_t i = 0; i < std::min(capacity, r.witness->mixing.size()); ++i) {
          mixing[i] = r.witness->mixing[i];
        }
      }
    }
  });
}

nc_status nc_mode_parse(const char* name, nc_mode* out) {
  return guarded([&] {
    require(name && out, "nc_mode_parse: null argument");
    const std::string s = name;
    if (s == "colluding") {
      *out = NC_MODE_COLLUDING;
    } else if (s == "product" || s == "non-colluding") {
      *out = NC_MODE_PRODUCT;
    } else if (s == "broadcast") {
      *out = NC_MODE_BROADCAST;
    } else {
      throw std::invalid_argument("unknown mode '" + s + "' (colluding|product|broadcast)");
    }
  });
}

const char* nc_mode_name(nc_mode mode) {
  switch (mode) {
  case NC_MODE_COLLUDING: return "colluding";
  case NC_MODE_PRODUCT: return "product";
  case NC_MODE_BROADCAST: return "broadcast";
  }
  return "unknown";
}

nc_status nc_attack_parse(const char* name, nc_attack* out) {
  return guarded([&] {
    require(name && out, "nc_attack_parse: null argument");
    const auto s = nc::parse_strategy(name);
    if (!s) {
      throw std::invalid_argument(std::string("unknown attack '") + name +
                                  "' (flip_retained|flip_challenge|resample|resample_retained|"
                                  "wrong_message)");
    }
    *out = static_cast<nc_attack>(*s);
  });
}

const char* nc_attack_name(nc_attack attack) {
  return nc::strategy_name(static_cast<nc::BindingStrategy>(attack)).data();
}

nc_status nc_capacity_compute(const nc_channel* ch, nc_mode mode, uint64_t seed, nc_capacity** out) {
  return guarded([&] {
    require(ch && out, "nc_capacity_compute: null argument");
    auto c = std::make_unique<nc_capacity>();
    if (mode == NC_MODE_BROADCAST) {
      require(ch->spec.is_broadcast(), "broadcast capacity needs a channel with a single input");
      const nc::BroadcastChannel bc = nc::as_broadcast(ch->spec);
      const nc::CapacityResult r = nc::broadcast_capacity(bc, seed);
      c->value = r.value;
      c->warning = r.warning;
      c->argmax.assign(r.argmax.joint().probs().begin(), r.argmax.joint().probs().end());
      for (std::size_t b = 0; b < bc.num_receivers(); ++b) {
        c->constraints.emplace_back(
            static_cast<std::uint32_t>(b),
            nc::conditional_entropy_through(nc::marginal(b, bc), r.argmax.joint()));
      }
    } else {
      require(ch->spec.is_mac(), "sum-rate capacity needs a channel with a single output");
      const nc::MacChannel m = nc::as_mac(ch->spec);
      const nc::CapacityResult r = nc::sum_rate_capacity(
          m, mode == NC_MODE_COLLUDING ? nc::CollusionMode::Colluding : nc::CollusionMode::NonColluding,
          seed);
      c->value = r.value;
      c->warning = r.warning;
      c->argmax.assign(r.argmax.joint().probs().begin(), r.argmax.joint().probs().end());
      const nc::SetFunction f = nc::entropy_set_function(m, r.argmax);
      for (nc::SubsetMask t = 1; t <= f.full(); ++t) {
        c->constraints.emplace_back(t, f(t));
      }
    }
    *out = c.release();
  });
}

void nc_capacity_free(nc_capacity* c) { delete c; }
double nc_capacity_value(const nc_capacity* c) { return c ? c->value : 0.0; }
size_t nc_capacity_argmax_size(const nc_capacity* c) { return c ? c->argmax.size() : 0; }
double nc_capacity_argmax(const nc_capacity* c, size_t index) {
  return c && index < c->argmax.size() ? c->argmax[index] : 0.0;
}
size_t nc_capacity_num_constraints(const nc_capacity* c) { return c ? c->constraints.size() : 0; }
uint32_t nc_capacity_constraint_subset(const nc_capacity* c, size_t index) {
  return c && index < c->constraints.size() ? c->constraints[index].first : 0;
}
double nc_capacity_constraint_value(const nc_capacity* c, size_t index) {
  return c && index < c->constraints.size() ? c->constraints[index].second : 0.0;
}
const char* nc_capacity_warning(const nc_capacity* c) { return c ? c->warning.c_str() : ""; }

nc_run_config nc_run_config_default(void) {
  nc_run_config cfg{};
  cfg.mode = NC_MODE_COLLUDING;
  cfg.n = 2000;
  cfg.mu = 0.1;
  cfg.eta = 0.02;
  cfg.eps = 0.0;
  cfg.security = 40;
  cfg.trials = 0;
  cfg.seed = 1;
  cfg.threads = 0;
  cfg.attack = NC_ATTACK_RESAMPLE;
  cfg.attack_k = 1;
  cfg.rates = nullptr;
  cfg.num_rates = 0;
  cfg.available = nullptr;
  cfg.num_available = 0;
  cfg.b_star = -1;
  return cfg;
}

nc_status nc_simulate(const nc_channel* ch, const nc_run_config* cfg, nc_simulation** out) {
  return guarded([&] {
    require(ch && cfg && out, "nc_simulate: null argument");
    require(cfg->attack >= NC_ATTACK_FLIP_RETAINED && cfg->attack <= NC_ATTACK_WRONG_MESSAGE,
            "nc_simulate: unknown attack");
    const nc::BindingConfig attack{static_cast<nc::BindingStrategy>(cfg->attack), cfg->attack_k};
    auto sim = std::make_unique<nc_simulation>();
    unsigned threads = 1;
    if (cfg->mode == NC_MODE_BROADCAST) {
      const nc::BroadcastScheme scheme = broadcast_scheme(*ch, *cfg, &threads);
      sim->trials = nc::simulate_broadcast(scheme, attack, cfg->trials, cfg->seed, threads,
                                           available_set(*cfg, scheme.channel.num_receivers()),
                                           b_star_of(*cfg));
      sim->eps = scheme.params.eps;
      sim->rates = scheme.params.rates;
      sim->certified_bound = std::numeric_limits<double>::quiet_NaN();
    } else {
      const nc::MacScheme scheme = mac_scheme(*ch, *cfg, &threads);
      sim->trials = nc::simulate_mac(scheme, attack, cfg->trials, cfg->seed, threads);
      sim->eps = scheme.params.eps;
      sim->rates = scheme.params.rates;
      sim->certified_bound = nc::certified_concealment_bound(scheme);
    }
    sim->summary = nc::summarize(sim->trials);
    *out = sim.release();
  });
}

void nc_simulation_free(nc_simulation* sim) { delete sim; }
size_t nc_simulation_num_trials(const nc_simulation* sim) { return sim ? sim->trials.size() : 0; }

nc_status nc_simulation_trial(const nc_simulation* sim, size_t index, nc_trial_record* out) {
  return guarded([&] {
    require(sim && out, "nc_simulation_trial: null argument");
    require(index < sim->trials.size(), "nc_simulation_trial: index out of range");
    const auto& t = sim->trials[index];
    out->accepted = t.accepted ? 1 : 0;
    out->attack_success = t.attack_success ? 1 : 0;
    out->concealment_stat = t.concealment_stat;
  });
}

nc_status nc_simulation_summary(const nc_simulation* sim, nc_summary* out) {
  return guarded([&] {
    require(sim && out, "nc_simulation_summary: null argument");
    const auto& s = sim->summary;
    out->trials = s.trials;
    out->accepted = s.accepted;
    out->attack_successes = s.attack_successes;
    out->acceptance_lower = s.acceptance.lower;
    out->acceptance_upper = s.acceptance.upper;
    out->attack_lower = s.attack.lower;
    out->attack_upper = s.attack.upper;
    out->mean_concealment_stat = s.mean_concealment_stat;
  });
}

double nc_simulation_eps(const nc_simulation* sim) { return sim ? sim->eps : 0.0; }
size_t nc_simulation_num_rates(const nc_simulation* sim) { return sim ? sim->rates.size() : 0; }
size_t nc_simulation_rate(const nc_simulation* sim, size_t index) {
  return sim && index < sim->rates.size() ? sim->rates[index] : 0;
}
double nc_simulation_certified_bound(const nc_simulation* sim) {
  return sim ? sim->certified_bound : 0.0;
}

nc_status nc_commit(const nc_channel* ch, const nc_run_config* cfg, char** transcript) {
  return guarded([&] {
    require(ch && cfg && transcript, "nc_commit: null argument");
    const nc::RunSeed rs{cfg->seed, 0};
    if (cfg->mode == NC_MODE_BROADCAST) {
      const nc::BroadcastScheme scheme = broadcast_scheme(*ch, *cfg, nullptr);
      const nc::BitString a = nc::random_messages(scheme.params.rates, rs)[0];
      const nc::BroadcastCommit c = nc::commit_broadcast(scheme, a, rs);
      nc::BroadcastTranscript t{
          header_for(*ch, *cfg, scheme.params,
                     {std::vector<double>(scheme.input.probs().begin(), scheme.input.probs().end())}),
          c.view, nc::BroadcastClaim{c.x, c.a}};
      *transcript = dup_string(nc::write_transcript(t));
      return;
    }
    const nc::MacScheme scheme = mac_scheme(*ch, *cfg, nullptr);
    const nc::CommitResult c =
        nc::commit_mac(scheme, nc::random_messages(scheme.params.rates, rs), rs);
    std::vector<std::vector<double>> input;
    if (scheme.mode == nc::CollusionMode::NonColluding) {
      for (const nc::Pmf& f : scheme.input.factors()) {
        input.emplace_back(f.probs().begin(), f.probs().end());
      }
    } else {
      input.emplace_back(scheme.input.joint().probs().begin(), scheme.input.joint().probs().end());
    }
    nc::MacTranscript t{header_for(*ch, *cfg, scheme.params, std::move(input)), c.view,
                        c.honest_claim()};
    *transcript = dup_string(nc::write_transcript(t));
  });
}

nc_status nc_reveal(const nc_channel* ch, const char* transcript, const nc_run_config* cfg,
                    nc_verdict* verdicts, size_t capacity, size_t* count, int* all_accepted) {
  return guarded([&] {
    require(ch && transcript && all_accepted, "nc_reveal: null argument");
    const nc_run_config defaults = nc_run_config_default();
    const nc_run_config& rc = cfg ? *cfg : defaults;
    const std::string mode = parsed([&] { return nc::transcript_mode(transcript); });
    auto emit = [&](std::size_t i, const nc::BidderVerdict& v) {
      if (verdicts && i < capacity) {
        verdicts[i] = nc_verdict{v.typical ? 1 : 0, v.challenge ? 1 : 0, v.pad ? 1 : 0,
                                 v.accepted() ? 1 : 0};
      }
    };
    if (mode == "broadcast") {
      const nc::BroadcastTranscript t =
          parsed([&] { return nc::read_broadcast_transcript(transcript); });
      require(t.header.input_sizes == ch->spec.input_sizes &&
                  t.header.output_sizes == ch->spec.output_sizes,
              "nc_reveal: transcript was made for a different channel shape");
      require(t.claim.has_value(), "nc_reveal: transcript carries no claim");
      require(t.header.input.size() == 1, "nc_reveal: broadcast input must be a single law");
      const nc::BroadcastScheme scheme{nc::as_broadcast(ch->spec), nc::Pmf(t.header.input[0]),
                                       t.header.params};
      const nc::BroadcastReveal r = nc::reveal_broadcast(
          scheme, t.view, t.claim->x, t.claim->a,
          available_set(rc, scheme.channel.num_receivers()), b_star_of(rc),
          nc::RunSeed{rc.seed, 0});
      emit(0, r.verdict);
      if (count) {
        *count = 1;
      }
      *all_accepted = r.verdict.accepted() ? 1 : 0;
      return;
    }
    const nc::MacTranscript t = parsed([&] { return nc::read_mac_transcript(transcript); });
    require(t.header.input_sizes == ch->spec.input_sizes &&
                t.header.output_sizes == ch->spec.output_sizes,
            "nc_reveal: transcript was made for a different channel shape");
    require(t.claim.has_value(), "nc_reveal: transcript carries no claim");
    const nc::MacScheme scheme{nc::as_mac(ch->spec), nc::header_input(t.header),
                               mode == "colluding" ? nc::CollusionMode::Colluding
                                                   : nc::CollusionMode::NonColluding,
                               t.header.params};
    const nc::RevealOutcome r = nc::reveal_mac(scheme, t.view, *t.claim);
    for (std::size_t i = 0; i < r.bidders.size(); ++i) {
      emit(i, r.bidders[i]);
    }
    if (count) {
      *count = r.bidders.size();
    }
    *all_accepted = r.all_accepted() ? 1 : 0;
  });
}

} // extern "C"
