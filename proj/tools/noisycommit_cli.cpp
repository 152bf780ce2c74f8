// noisycommit: channel checks, capacity computation and protocol runs.
//
// Exit codes: 0 success, 1 negative finding, 2 error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisycommit/noisycommit.h"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitError = 2;

struct Failure {
  std::string message;
};

std::string fmt(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void check(nc_status s, const std::string& what) {
  if (s != NC_OK) {
    std::string msg = what + ": " + nc_status_name(s) + ": " + nc_last_error();
    if (s == NC_ERR_PARSE && nc_last_error_line() > 0) {
      msg += " (line " + std::to_string(nc_last_error_line()) + ")";
    }
    throw Failure{msg};
  }
}

struct ChannelHandle {
  nc_channel* ptr = nullptr;
  ~ChannelHandle() { nc_channel_free(ptr); }
};

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

std::string preamble(const ordered_json& config) {
  return std::string("# noisycommit ") + nc_version() + "\n# config: " + config.dump() + "\n";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw Failure{"cannot write '" + out_path + "'"};
  }
  f << text;
}

std::string subset_label(std::uint32_t mask) {
  std::string s = "{";
  bool first = true;
  for (unsigned l = 0; l < 32; ++l) {
    if (mask & (1u << l)) {
      s += (first ? "" : ",") + std::to_string(l + 1);
      first = false;
    }
  }
  return s + "}";
}

struct RunOptions {
  std::string channel;
  std::string mode = "colluding";
  std::size_t n = 2000;
  double mu = 0.1;
  double eta = 0.02;
  double eps = 0.0;
  unsigned security = 40;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::string out;
  std::string attack = "resample";
  std::size_t k = 1;
  std::vector<std::size_t> rates;
  std::vector<std::size_t> available;
  long b_star = 0;  // 1-based on the command line; 0 = uniform
  std::string transcript;
};

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--mode", o.mode, "colluding | product | broadcast")->capture_default_str();
  cmd->add_option("--n", o.n, "block length")->capture_default_str();
  cmd->add_option("--mu", o.mu, "challenge fraction")->capture_default_str();
  cmd->add_option("--eta", o.eta, "challenge hash fraction")->capture_default_str();
  cmd->add_option("--eps", o.eps, "typicality tolerance (0 = calibrated)")->capture_default_str();
  cmd->add_option("--security", o.security, "security level s in bits")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--rates", o.rates, "per-bidder pad lengths (default: largest allowed)");
  cmd->add_option("--available", o.available, "surviving verifiers, 1-based (broadcast)");
  cmd->add_option("--bstar", o.b_star, "adjudicating verifier, 1-based (broadcast; 0 = random)")
      ->capture_default_str();
}

struct Config {
  nc_run_config cfg = nc_run_config_default();
  std::vector<std::size_t> available;
};

Config make_config(const RunOptions& o) {
  Config c;
  check(nc_mode_parse(o.mode.c_str(), &c.cfg.mode), "--mode");
  check(nc_attack_parse(o.attack.c_str(), &c.cfg.attack), "--attack");
  c.cfg.n = o.n;
  c.cfg.mu = o.mu;
  c.cfg.eta = o.eta;
  c.cfg.eps = o.eps;
  c.cfg.security = o.security;
  c.cfg.trials = o.trials;
  c.cfg.seed = o.seed;
  c.cfg.attack_k = o.k;
  if (!o.rates.empty()) {
    c.cfg.rates = o.rates.data();
    c.cfg.num_rates = o.rates.size();
  }
  for (std::size_t b : o.available) {
    if (b == 0) {
      throw Failure{"--available: verifier indices are 1-based"};
    }
    c.available.push_back(b - 1);
  }
  if (!c.available.empty()) {
    c.cfg.available = c.available.data();
    c.cfg.num_available = c.available.size();
  }
  c.cfg.b_star = o.b_star > 0 ? o.b_star - 1 : -1;
  return c;
}

ordered_json run_config_json(const std::string& command, const RunOptions& o, const nc_run_config& cfg,
                             double eps, const std::vector<std::size_t>& rates) {
  ordered_json j;
  j["command"] = command;
  j["channel"] = o.channel;
  j["mode"] = nc_mode_name(cfg.mode);
  j["n"] = cfg.n;
  j["mu"] = cfg.mu;
  j["eta"] = cfg.eta;
  j["eps"] = eps;
  j["eps_source"] = o.eps > 0 ? "flag" : "calibrated";
  j["security"] = cfg.security;
  j["rates"] = rates;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["attack"] = nc_attack_name(cfg.attack);
  j["attack_k"] = cfg.attack_k;
  if (cfg.mode == NC_MODE_BROADCAST) {
    std::vector<std::size_t> avail;
    for (std::size_t b : o.available) {
      avail.push_back(b);
    }
    j["available"] = avail;
    j["b_star"] = o.b_star;
  }
  return j;
}

int cmd_check(const std::string& channel, const std::string& out) {
  ChannelHandle ch;
  check(nc_channel_load(channel.c_str(), &ch.ptr), channel);
  nc_redundancy_report r{};
  std::vector<double> mix(1024, 0.0);
  check(nc_channel_check(ch.ptr, &r, mix.data(), mix.size()), "check");
  ordered_json config;
  config["command"] = "check";
  config["channel"] = channel;
  std::ostringstream s;
  s << preamble(config);
  s << "channel: " << nc_channel_id(ch.ptr) << "\n";
  s << "non_redundant: " << (r.non_redundant ? "true" : "false") << "\n";
  s << "margin: " << fmt(r.margin) << "\n";
  s << "injective-sufficient: " << (r.injective ? "true" : "false") << "\n";
  if (!r.non_redundant) {
    s << "witness_input: " << r.witness_input << "\n";
    s << "witness_mixing:";
    for (std::size_t i = 0; i < std::min(r.witness_size, mix.size()); ++i) {
      s << " " << fmt(mix[i]);
    }
    s << "\n";
  }
  emit(s.str(), out);
  return r.non_redundant ? kExitOk : kExitNegative;
}

int cmd_capacity(const std::string& channel, const std::string& mode_name, std::uint64_t seed,
                 const std::string& out) {
  ChannelHandle ch;
  check(nc_channel_load(channel.c_str(), &ch.ptr), channel);
  nc_mode mode;
  check(nc_mode_parse(mode_name.c_str(), &mode), "--mode");
  nc_capacity* raw = nullptr;
  check(nc_capacity_compute(ch.ptr, mode, seed, &raw), "capacity");
  std::unique_ptr<nc_capacity, void (*)(nc_capacity*)> cap(raw, nc_capacity_free);

  ordered_json config;
  config["command"] = "capacity";
  config["channel"] = channel;
  config["mode"] = nc_mode_name(mode);
  config["seed"] = seed;
  std::string argmax;
  for (std::size_t i = 0; i < nc_capacity_argmax_size(cap.get()); ++i) {
    argmax += (i ? ";" : "") + fmt(nc_capacity_argmax(cap.get(), i));
  }
  std::string constraints;
  for (std::size_t i = 0; i < nc_capacity_num_constraints(cap.get()); ++i) {
    const std::uint32_t t = nc_capacity_constraint_subset(cap.get(), i);
    const std::string label = mode == NC_MODE_BROADCAST ? "H(X|Y" + std::to_string(t + 1) + ")"
                                                        : "H(X_" + subset_label(t) + "|Y)";
    constraints += (i ? ";" : "") + label + "=" + fmt(nc_capacity_constraint_value(cap.get(), i));
  }
  std::ostringstream s;
  s << preamble(config);
  s << "channel_id,mode,value,argmax,constraints,warning\n";
  s << quote_csv(nc_channel_id(ch.ptr)) << "," << nc_mode_name(mode) << ","
    << fmt(nc_capacity_value(cap.get())) << "," << argmax << "," << quote_csv(constraints) << ","
    << quote_csv(nc_capacity_warning(cap.get())) << "\n";
  emit(s.str(), out);
  return kExitOk;
}

int cmd_simulate(const RunOptions& o) {
  ChannelHandle ch;
  check(nc_channel_load(o.channel.c_str(), &ch.ptr), o.channel);
  Config c = make_config(o);
  nc_simulation* raw = nullptr;
  check(nc_simulate(ch.ptr, &c.cfg, &raw), "simulate");
  std::unique_ptr<nc_simulation, void (*)(nc_simulation*)> sim(raw, nc_simulation_free);

  std::vector<std::size_t> rates;
  for (std::size_t i = 0; i < nc_simulation_num_rates(sim.get()); ++i) {
    rates.push_back(nc_simulation_rate(sim.get(), i));
  }
  ordered_json config = run_config_json("simulate", o, c.cfg, nc_simulation_eps(sim.get()), rates);
  const double bound = nc_simulation_certified_bound(sim.get());
  if (!std::isnan(bound)) {
    config["certified_concealment_bound"] = bound;
  }
  std::ostringstream s;
  s << preamble(config);
  s << "row,accepted,attack_success,concealment_stat,lower_accept,upper_accept,lower_attack,"
       "upper_attack\n";
  const std::size_t trials = nc_simulation_num_trials(sim.get());
  for (std::size_t i = 0; i < trials; ++i) {
    nc_trial_record t{};
    check(nc_simulation_trial(sim.get(), i, &t), "simulate");
    s << i << "," << t.accepted << "," << t.attack_success << "," << fmt(t.concealment_stat)
      << ",,,,\n";
  }
  int code = kExitOk;
  if (trials > 0) {
    nc_summary sum{};
    check(nc_simulation_summary(sim.get(), &sum), "simulate");
    const double acc = static_cast<double>(sum.accepted) / static_cast<double>(sum.trials);
    const double att = static_cast<double>(sum.attack_successes) / static_cast<double>(sum.trials);
    s << "summary," << fmt(acc) << "," << fmt(att) << "," << fmt(sum.mean_concealment_stat) << ","
      << fmt(sum.acceptance_lower) << "," << fmt(sum.acceptance_upper) << ","
      << fmt(sum.attack_lower) << "," << fmt(sum.attack_upper) << "\n";
    if (acc < 0.99 || att > 0.01) {
      code = kExitNegative;
    }
  }
  emit(s.str(), o.out);
  return code;
}

int cmd_commit(const RunOptions& o) {
  ChannelHandle ch;
  check(nc_channel_load(o.channel.c_str(), &ch.ptr), o.channel);
  Config c = make_config(o);
  char* text = nullptr;
  check(nc_commit(ch.ptr, &c.cfg, &text), "commit");
  const std::string t = text;
  nc_string_free(text);
  emit(t, o.out);
  return kExitOk;
}

int cmd_reveal(const RunOptions& o) {
  ChannelHandle ch;
  check(nc_channel_load(o.channel.c_str(), &ch.ptr), o.channel);
  std::ifstream f(o.transcript, std::ios::binary);
  if (!f) {
    throw Failure{"cannot open transcript '" + o.transcript + "'"};
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  Config c = make_config(o);
  std::vector<nc_verdict> v(64);
  std::size_t count = 0;
  int all = 0;
  check(nc_reveal(ch.ptr, buf.str().c_str(), &c.cfg, v.data(), v.size(), &count, &all), "reveal");
  ordered_json config;
  config["command"] = "reveal";
  config["channel"] = o.channel;
  config["transcript"] = o.transcript;
  std::ostringstream s;
  s << preamble(config);
  s << "party,typical,challenge,pad,accepted\n";
  for (std::size_t i = 0; i < std::min(count, v.size()); ++i) {
    s << i + 1 << "," << v[i].typical << "," << v[i].challenge << "," << v[i].pad << ","
      << v[i].accepted << "\n";
  }
  s << "verdict," << (all ? "accept" : "reject") << ",,,\n";
  emit(s.str(), o.out);
  return all ? kExitOk : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Commitment over noisy channels: non-redundancy checks, capacity, protocol runs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(nc_version()));

  std::string channel;
  std::string out;
  std::string mode = "colluding";
  std::uint64_t seed = 1;

  auto* check_cmd = app.add_subcommand("check", "non-redundancy of a channel file");
  check_cmd->add_option("--channel", channel, "channel file")->required();
  check_cmd->add_option("--out", out, "output file (default stdout)");

  auto* cap_cmd = app.add_subcommand("capacity", "commitment capacity as CSV");
  cap_cmd->add_option("--channel", channel, "channel file")->required();
  cap_cmd->add_option("--mode", mode, "colluding | product | broadcast")->capture_default_str();
  cap_cmd->add_option("--seed", seed, "optimizer restart seed")->capture_default_str();
  cap_cmd->add_option("--out", out, "output file (default stdout)");

  RunOptions run;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo protocol runs as CSV");
  sim_cmd->add_option("--channel", run.channel, "channel file")->required();
  add_run_flags(sim_cmd, run);
  sim_cmd->add_option("--trials", run.trials, "number of runs")->capture_default_str();
  sim_cmd->add_option("--attack", run.attack,
                      "flip_retained | flip_challenge | resample | resample_retained | wrong_message")
      ->capture_default_str();
  sim_cmd->add_option("--k", run.k, "symbols changed by flip attacks")->capture_default_str();
  sim_cmd->add_option("--out", run.out, "output file (default stdout)");

  auto* commit_cmd = app.add_subcommand("commit", "one commitment, written as a transcript");
  commit_cmd->add_option("--channel", run.channel, "channel file")->required();
  add_run_flags(commit_cmd, run);
  commit_cmd->add_option("--out", run.out, "transcript file (default stdout)");

  auto* reveal_cmd = app.add_subcommand("reveal", "replay the reveal tests on a transcript");
  reveal_cmd->add_option("--channel", run.channel, "channel file")->required();
  reveal_cmd->add_option("--transcript", run.transcript, "transcript file")->required();
  reveal_cmd->add_option("--available", run.available, "surviving verifiers, 1-based (broadcast)");
  reveal_cmd->add_option("--bstar", run.b_star, "adjudicating verifier, 1-based (0 = random)");
  reveal_cmd->add_option("--seed", run.seed, "seed for a random adjudicator");
  reveal_cmd->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*check_cmd) {
      return cmd_check(channel, out);
    }
    if (*cap_cmd) {
      return cmd_capacity(channel, mode, seed, out);
    }
    if (*sim_cmd) {
      return cmd_simulate(run);
    }
    if (*commit_cmd) {
      return cmd_commit(run);
    }
    if (*reveal_cmd) {
      run.out = out;
      return cmd_reveal(run);
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
