/* C interface to the noisy-channel commitment library.
 *
 * Objects are opaque handles created by nc_*_load/compute/run functions and
 * released with the matching nc_*_free. Every fallible call returns an
 * nc_status; on failure nc_last_error() describes the problem for the
 * calling thread. */
#ifndef NOISYCOMMIT_H
#define NOISYCOMMIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(NC_BUILDING_LIBRARY)
#define NC_API __attribute__((visibility("default")))
#else
#define NC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nc_status {
  NC_OK = 0,
  NC_ERR_INVALID_ARGUMENT = 1,
  NC_ERR_PARSE = 2,
  NC_ERR_IO = 3,
  NC_ERR_DOMAIN = 4,
  NC_ERR_INTERNAL = 5
} nc_status;

NC_API const char* nc_version(void);
NC_API const char* nc_status_name(nc_status status);
/* Message for the last failed call on this thread; "" if none. */
NC_API const char* nc_last_error(void);
/* 1-based line of the last NC_ERR_PARSE, 0 if unknown. */
NC_API size_t nc_last_error_line(void);

/* Strings returned through char** are owned by the caller. */
NC_API void nc_string_free(char* s);

/* ---- channels ---------------------------------------------------------- */

typedef struct nc_channel nc_channel;

NC_API nc_status nc_channel_load(const char* path, nc_channel** out);
NC_API nc_status nc_channel_parse(const char* text, nc_channel** out);
NC_API void nc_channel_free(nc_channel* ch);

NC_API const char* nc_channel_id(const nc_channel* ch);
NC_API size_t nc_channel_num_inputs(const nc_channel* ch);
NC_API size_t nc_channel_input_size(const nc_channel* ch, size_t index);
NC_API size_t nc_channel_num_outputs(const nc_channel* ch);
NC_API size_t nc_channel_output_size(const nc_channel* ch, size_t index);
NC_API nc_status nc_channel_serialize(const nc_channel* ch, char** out);

typedef struct nc_redundancy_report {
  int non_redundant;
  /* Rank test on the flattened channel; implies non_redundant when set. */
  int injective;
  /* min over x of the l1 distance from W_x to the mixtures of the other
   * rows; +inf for a single input. */
  double margin;
  /* Meaningful when !non_redundant. */
  size_t witness_input;
  size_t witness_size;
} nc_redundancy_report;

/* Non-redundancy of the flattened channel. If `mixing` is non-NULL and the
 * channel is redundant, up to `capacity` witness mixing weights are copied. */
NC_API nc_status nc_channel_check(const nc_channel* ch, nc_redundancy_report* out,
                                  double* mixing, size_t capacity);

/* ---- capacity ---------------------------------------------------------- */

typedef enum nc_mode {
  NC_MODE_COLLUDING = 0,
  NC_MODE_PRODUCT = 1,
  NC_MODE_BROADCAST = 2
} nc_mode;

NC_API nc_status nc_mode_parse(const char* name, nc_mode* out);
NC_API const char* nc_mode_name(nc_mode mode);

typedef struct nc_capacity nc_capacity;

/* COLLUDING / PRODUCT: max H(X_L|Y) over joint / product inputs of a MAC.
 * BROADCAST: max_p min_b H(X|Y_b) for a single-input channel. */
NC_API nc_status nc_capacity_compute(const nc_channel* ch, nc_mode mode, uint64_t seed,
                                     nc_capacity** out);
NC_API void nc_capacity_free(nc_capacity* c);
NC_API double nc_capacity_value(const nc_capacity* c);
/* Maximizing law over the flattened input alphabet. */
NC_API size_t nc_capacity_argmax_size(const nc_capacity* c);
NC_API double nc_capacity_argmax(const nc_capacity* c, size_t index);
/* Region constraints R_T <= H(X_T|Y) at the maximizer, one per nonempty
 * subset T (bitmask, bit l = bidder l); for broadcast, one per verifier
 * with the verifier index as `subset`. */
NC_API size_t nc_capacity_num_constraints(const nc_capacity* c);
NC_API uint32_t nc_capacity_constraint_subset(const nc_capacity* c, size_t index);
NC_API double nc_capacity_constraint_value(const nc_capacity* c, size_t index);
/* "" unless a hypothesis (non-redundancy) fails. */
NC_API const char* nc_capacity_warning(const nc_capacity* c);

/* ---- protocol runs ----------------------------------------------------- */

typedef enum nc_attack {
  NC_ATTACK_FLIP_RETAINED = 0,
  NC_ATTACK_FLIP_CHALLENGE = 1,
  NC_ATTACK_RESAMPLE = 2,
  NC_ATTACK_RESAMPLE_RETAINED = 3,
  NC_ATTACK_WRONG_MESSAGE = 4
} nc_attack;

NC_API nc_status nc_attack_parse(const char* name, nc_attack* out);
NC_API const char* nc_attack_name(nc_attack attack);

typedef struct nc_run_config {
  nc_mode mode;
  size_t n;
  double mu;
  double eta;
  /* <= 0 selects the calibrated default. */
  double eps;
  unsigned security;
  size_t trials;
  uint64_t seed;
  /* 0 reads NOISY_COMMIT_THREADS. */
  unsigned threads;
  nc_attack attack;
  size_t attack_k;
  /* NULL selects the largest rates the security level allows. */
  const size_t* rates;
  size_t num_rates;
  /* Broadcast only: surviving verifiers (NULL = all) and adjudicator
   * (negative = uniform over the survivors). */
  const size_t* available;
  size_t num_available;
  long b_star;
} nc_run_config;

/* mu 0.1, eta 0.02, security 40, calibrated eps, resample attack, k 1. */
NC_API nc_run_config nc_run_config_default(void);

typedef struct nc_simulation nc_simulation;

typedef struct nc_trial_record {
  int accepted;
  int attack_success;
  double concealment_stat;
} nc_trial_record;

typedef struct nc_summary {
  size_t trials;
  size_t accepted;
  size_t attack_successes;
  double acceptance_lower;
  double acceptance_upper;
  double attack_lower;
  double attack_upper;
  double mean_concealment_stat;
} nc_summary;

/* Honest commit/reveal per trial, one cheating attempt per trial, and the
 * concealment statistic; inputs are uniform (product-uniform in PRODUCT
 * mode). */
NC_API nc_status nc_simulate(const nc_channel* ch, const nc_run_config* cfg, nc_simulation** out);
NC_API void nc_simulation_free(nc_simulation* sim);
NC_API size_t nc_simulation_num_trials(const nc_simulation* sim);
NC_API nc_status nc_simulation_trial(const nc_simulation* sim, size_t index, nc_trial_record* out);
NC_API nc_status nc_simulation_summary(const nc_simulation* sim, nc_summary* out);
/* Resolved parameters actually used. */
NC_API double nc_simulation_eps(const nc_simulation* sim);
NC_API size_t nc_simulation_num_rates(const nc_simulation* sim);
NC_API size_t nc_simulation_rate(const nc_simulation* sim, size_t index);
/* Analytic concealment bound in bits for the resolved rates (MAC modes). */
NC_API double nc_simulation_certified_bound(const nc_simulation* sim);

/* One commitment with random messages; writes the transcript (commit view
 * plus the honest opening) as JSON. */
NC_API nc_status nc_commit(const nc_channel* ch, const nc_run_config* cfg, char** transcript);

typedef struct nc_verdict {
  int typical;
  int challenge;
  int pad;
  int accepted;
} nc_verdict;

/* Replays the reveal tests on a transcript with a claim. `verdicts` receives
 * up to `capacity` per-bidder results (for broadcast, one for b*);
 * `count` the number available. `all_accepted` is the verifier's output. */
NC_API nc_status nc_reveal(const nc_channel* ch, const char* transcript, const nc_run_config* cfg,
                           nc_verdict* verdicts, size_t capacity, size_t* count,
                           int* all_accepted);

#ifdef __cplusplus
}
#endif

#endif
