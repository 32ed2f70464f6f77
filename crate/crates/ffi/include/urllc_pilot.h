/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef URLLC_PILOT_H
#define URLLC_PILOT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UpPolicy {
  UP_POLICY_APC = 0,
  UP_POLICY_PPC = 1,
  UP_POLICY_PERFECT_CSI = 2,
} UpPolicy;

typedef enum UpScheme {
  UP_SCHEME_DIRECT = 0,
  UP_SCHEME_DECODE_FORWARD = 1,
} UpScheme;

// Result of every fallible call.
typedef enum UpStatus {
  UP_STATUS_OK = 0,
  UP_STATUS_NULL_POINTER = 1,
  UP_STATUS_INVALID_ARGUMENT = 2,
  UP_STATUS_DOMAIN = 3,
  // No blocklength in the range meets the target.
  UP_STATUS_INFEASIBLE = 4,
  UP_STATUS_QUADRATURE = 5,
  UP_STATUS_PANIC = 6,
} UpStatus;

// Opaque scenario handle.
typedef struct UpScenario UpScenario;

// Alternative modelling conventions; see the library documentation.
typedef struct UpConventions {
  // 0 per-link power, 1 total power split by eta.
  uint8_t total_power_split;
  // 0 relay-destination distance, 1 source-destination distance.
  uint8_t gamma_y_source_destination;
  // 0 relay-phase data length, 1 both phases.
  uint8_t mrc_combined_blocklength;
  // 0 rate in bits, 1 rate in nats inside the closed-form slope.
  uint8_t mu_log_nats;
  // 0 closed form, 1 quadrature for single-link outages.
  uint8_t outage_quadrature;
  // 0 latency counts data symbols only, 1 pilots too.
  uint8_t latency_includes_pilots;
} UpConventions;

typedef struct UpOutageBreakdown {
  double eps_z;
  double eps_x;
  double eps_srd;
  double eps_df;
} UpOutageBreakdown;

typedef struct UpOperatingPoint {
  double eps_target;
  uint32_t n_opt;
  uint32_t n_p_opt;
  double achieved_eps;
  double latency_s;
  double goodput;
  uint32_t data_uses;
} UpOperatingPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *up_version(void);

// Message of the calling thread's last failure, empty after a success.
const char *up_last_error_message(void);

// Scenario with the library defaults (10 dB per link, PPC with kappa 3,
// 500 channel uses per phase). Never returns null.
struct UpScenario *up_scenario_new(void);

// Scenario from configuration text (`[scenario]` and `[policy]` sections).
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be valid for writes.
enum UpStatus up_scenario_from_config(const char *text, struct UpScenario **out);

// Release a handle; null is ignored.
//
// # Safety
// `scenario` must be null or a handle from this library, not freed before.
void up_scenario_free(struct UpScenario *scenario);

// Transmit power per link in dB.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_power_db(struct UpScenario *scenario, double power_db);

// Coding rate in bits per channel use.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_rate(struct UpScenario *scenario, double rate);

// Blocklengths of the source and relay phases.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_blocklengths(struct UpScenario *scenario,
                                           uint32_t n_source,
                                           uint32_t n_relay);

// Power split `eta`, relay position `beta` and path-loss exponent `alpha`.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_geometry(struct UpScenario *scenario,
                                       double eta,
                                       double beta,
                                       double alpha);

// Pilot policy, one of `UpPolicy`; `kappa` is only read for PPC.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_policy(struct UpScenario *scenario, uint32_t policy, double kappa);

// Pilots per phase under PPC; 0 selects the optimum.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_pilots(struct UpScenario *scenario, uint32_t pilots);

// Modelling conventions; every field is 0 or 1.
//
// # Safety
// `scenario` must be null or a live handle.
enum UpStatus up_scenario_set_conventions(struct UpScenario *scenario,
                                          struct UpConventions conventions);

// Outage of direct transmission.
//
// # Safety
// `scenario` must be null or a live handle; `out` must be valid for writes.
enum UpStatus up_outage_direct(const struct UpScenario *scenario, double *out);

// Decode-and-forward outage with its per-link parts.
//
// # Safety
// `scenario` must be null or a live handle; `out` must be valid for writes.
enum UpStatus up_outage_df(const struct UpScenario *scenario, struct UpOutageBreakdown *out);

// Smallest-latency total blocklength in `[n_min, n_max]` meeting
// `eps_target`, for `scheme` one of `UpScheme`; `UP_STATUS_INFEASIBLE`
// when none does.
//
// # Safety
// `scenario` must be null or a live handle; `out` must be valid for writes.
enum UpStatus up_min_latency(const struct UpScenario *scenario,
                             uint32_t scheme,
                             double eps_target,
                             uint32_t n_min,
                             uint32_t n_max,
                             struct UpOperatingPoint *out);

// Highest-goodput total blocklength in `[n_min, n_max]` meeting
// `eps_target`, for `scheme` one of `UpScheme`; `UP_STATUS_INFEASIBLE`
// when none does.
//
// # Safety
// `scenario` must be null or a live handle; `out` must be valid for writes.
enum UpStatus up_max_goodput(const struct UpScenario *scenario,
                             uint32_t scheme,
                             double eps_target,
                             uint32_t n_min,
                             uint32_t n_max,
                             struct UpOperatingPoint *out);

// Gaussian tail probability.
//
// # Safety
// `out` must be valid for writes.
enum UpStatus up_q_func(double x, double *out);

// Inverse Gaussian tail probability for `0 < p < 1`.
//
// # Safety
// `out` must be valid for writes.
enum UpStatus up_q_inv(double p, double *out);

// Pilot count maximizing the PPC effective SNR at blocklength `n`.
//
// # Safety
// `out` must be valid for writes.
enum UpStatus up_optimal_pilot_count(uint32_t n, double kappa, double power_linear, uint32_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* URLLC_PILOT_H */
