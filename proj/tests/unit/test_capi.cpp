#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

#include "noisycommit/noisycommit.h"

namespace {

std::string data(const char* name) { return std::string(NC_DATA_DIR) + "/" + name; }

nc_channel* load(const char* name) {
  nc_channel* ch = nullptr;
  REQUIRE(nc_channel_load(data(name).c_str(), &ch) == NC_OK);
  return ch;
}

} // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(nc_version()) == "0.1.0");
  CHECK(std::string(nc_status_name(NC_ERR_PARSE)) == "parse error");
}

TEST_CASE("channel loading and checks") {
  nc_channel* ch = load("three_output_noninjective.json");
  CHECK(nc_channel_num_inputs(ch) == 1);
  CHECK(nc_channel_input_size(ch, 0) == 4);
  CHECK(nc_channel_output_size(ch, 0) == 3);
  nc_redundancy_report r{};
  REQUIRE(nc_channel_check(ch, &r, nullptr, 0) == NC_OK);
  CHECK(r.non_redundant == 1);
  CHECK(r.injective == 0);
  CHECK(r.margin > 0);

  char* text = nullptr;
  REQUIRE(nc_channel_serialize(ch, &text) == NC_OK);
  nc_channel* again = nullptr;
  REQUIRE(nc_channel_parse(text, &again) == NC_OK);
  char* text2 = nullptr;
  REQUIRE(nc_channel_serialize(again, &text2) == NC_OK);
  CHECK(std::string(text) == std::string(text2));
  nc_string_free(text);
  nc_string_free(text2);
  nc_channel_free(again);
  nc_channel_free(ch);

  nc_channel* mac = load("mac_and.json");
  double mix[4];
  REQUIRE(nc_channel_check(mac, &r, mix, 4) == NC_OK);
  CHECK(r.non_redundant == 0);
  CHECK(r.witness_size == 4);
  CHECK(mix[r.witness_input] == 0.0);
  nc_channel_free(mac);
}

TEST_CASE("errors") {
  nc_channel* ch = nullptr;
  CHECK(nc_channel_parse("{\n\"input_sizes\": [2],\n  oops\n}", &ch) == NC_ERR_PARSE);
  CHECK(ch == nullptr);
  CHECK(nc_last_error_line() == 3);
  CHECK(std::strlen(nc_last_error()) > 0);
  CHECK(nc_channel_load("/nonexistent/channel.json", &ch) == NC_ERR_IO);
  CHECK(nc_channel_load(nullptr, &ch) == NC_ERR_INVALID_ARGUMENT);
  nc_mode m;
  CHECK(nc_mode_parse("sideways", &m) == NC_ERR_INVALID_ARGUMENT);
  CHECK(nc_mode_parse("product", &m) == NC_OK);
  CHECK(m == NC_MODE_PRODUCT);
  nc_attack a;
  CHECK(nc_attack_parse("flip_challenge", &a) == NC_OK);
  CHECK(a == NC_ATTACK_FLIP_CHALLENGE);

  nc_channel* w1 = load("w1.json");
  nc_capacity* cap = nullptr;
  CHECK(nc_capacity_compute(w1, NC_MODE_COLLUDING, 0, &cap) == NC_OK);
  nc_capacity_free(cap);
  nc_channel* bc = load("bc_w1_twice.json");
  CHECK(nc_capacity_compute(bc, NC_MODE_PRODUCT, 0, &cap) == NC_ERR_INVALID_ARGUMENT);

  nc_run_config cfg = nc_run_config_default();
  cfg.mu = 0.01;
  cfg.eta = 0.02;
  nc_simulation* sim = nullptr;
  CHECK(nc_simulate(w1, &cfg, &sim) == NC_ERR_INVALID_ARGUMENT);
  CHECK(sim == nullptr);
  nc_channel_free(w1);
  nc_channel_free(bc);
}

TEST_CASE("capacity") {
  nc_channel* mac = load("mac_and.json");
  nc_capacity* c = nullptr;
  REQUIRE(nc_capacity_compute(mac, NC_MODE_COLLUDING, 0, &c) == NC_OK);
  CHECK(nc_capacity_value(c) >= 1.9647);
  CHECK(nc_capacity_argmax_size(c) == 4);
  double total = 0;
  for (size_t i = 0; i < 4; ++i) total += nc_capacity_argmax(c, i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(nc_capacity_num_constraints(c) == 3);
  CHECK(nc_capacity_constraint_subset(c, 2) == 3);
  CHECK(nc_capacity_constraint_value(c, 2) == doctest::Approx(nc_capacity_value(c)).epsilon(1e-12));
  CHECK(std::strlen(nc_capacity_warning(c)) > 0);
  nc_capacity_free(c);
  nc_channel_free(mac);

  nc_channel* bc = load("bc_w1_twice.json");
  REQUIRE(nc_capacity_compute(bc, NC_MODE_BROADCAST, 0, &c) == NC_OK);
  CHECK(std::abs(nc_capacity_value(c) - 0.9512) <= 1e-3);
  CHECK(nc_capacity_num_constraints(c) == 2);
  nc_capacity_free(c);
  nc_channel_free(bc);
}

TEST_CASE("simulation") {
  nc_channel* ch = load("mac_noisy_id.json");
  nc_run_config cfg = nc_run_config_default();
  cfg.n = 1000;
  cfg.trials = 20;
  cfg.seed = 4;
  cfg.threads = 1;
  nc_simulation* a = nullptr;
  REQUIRE(nc_simulate(ch, &cfg, &a) == NC_OK);
  cfg.threads = 2;
  nc_simulation* b = nullptr;
  REQUIRE(nc_simulate(ch, &cfg, &b) == NC_OK);
  REQUIRE(nc_simulation_num_trials(a) == 20);
  for (size_t i = 0; i < 20; ++i) {
    nc_trial_record ra, rb;
    REQUIRE(nc_simulation_trial(a, i, &ra) == NC_OK);
    REQUIRE(nc_simulation_trial(b, i, &rb) == NC_OK);
    CHECK(ra.accepted == rb.accepted);
    CHECK(ra.concealment_stat == rb.concealment_stat);
  }
  nc_trial_record out;
  CHECK(nc_simulation_trial(a, 20, &out) == NC_ERR_INVALID_ARGUMENT);
  nc_summary s;
  REQUIRE(nc_simulation_summary(a, &s) == NC_OK);
  CHECK(s.trials == 20);
  CHECK(s.accepted >= 19);
  CHECK(s.attack_successes == 0);
  CHECK(nc_simulation_num_rates(a) == 2);
  CHECK(nc_simulation_eps(a) > 0);
  CHECK(nc_simulation_certified_bound(a) < 1e-6);
  nc_simulation_free(a);
  nc_simulation_free(b);
  nc_channel_free(ch);
}

TEST_CASE("commit and reveal through transcripts") {
  nc_channel* ch = load("mac_noisy_id.json");
  nc_run_config cfg = nc_run_config_default();
  cfg.n = 2000;
  cfg.seed = 12;
  char* text = nullptr;
  REQUIRE(nc_commit(ch, &cfg, &text) == NC_OK);
  nc_verdict v[2];
  size_t count = 0;
  int all = 0;
  REQUIRE(nc_reveal(ch, text, &cfg, v, 2, &count, &all) == NC_OK);
  CHECK(count == 2);
  CHECK(all == 1);

  auto doc = nlohmann::json::parse(text);
  std::string hex = doc["claim"][1]["a"]["hex"];
  REQUIRE(!hex.empty());
  hex[0] = hex[0] == '0' ? '8' : '0';
  doc["claim"][1]["a"]["hex"] = hex;
  const std::string tampered = doc.dump();
  REQUIRE(nc_reveal(ch, tampered.c_str(), &cfg, v, 2, &count, &all) == NC_OK);
  CHECK(all == 0);
  CHECK(v[0].accepted == 1);
  CHECK(v[1].pad == 0);

  CHECK(nc_reveal(ch, "{\"schema_version\": 1}", &cfg, v, 2, &count, &all) == NC_ERR_PARSE);
  nc_string_free(text);

  nc_channel* bc = load("bc_w1_twice.json");
  cfg = nc_run_config_default();
  cfg.mode = NC_MODE_BROADCAST;
  cfg.seed = 3;
  REQUIRE(nc_commit(bc, &cfg, &text) == NC_OK);
  size_t avail[1] = {1};
  cfg.available = avail;
  cfg.num_available = 1;
  REQUIRE(nc_reveal(bc, text, &cfg, v, 2, &count, &all) == NC_OK);
  CHECK(count == 1);
  CHECK(all == 1);
  cfg.b_star = 0;
  CHECK(nc_reveal(bc, text, &cfg, v, 2, &count, &all) == NC_ERR_INVALID_ARGUMENT);
  nc_string_free(text);
  nc_channel_free(bc);
  nc_channel_free(ch);
}
