#ifndef BPALLOC_H
#define BPALLOC_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success.
#define BP_OK 0

// Malformed input: bad TOML, bad enum value, missing thresholds, etc.
#define BP_ERR_INVALID 1

// The instance admits no feasible allocation.
#define BP_ERR_INFEASIBLE 2

// The numerical solver failed to converge.
#define BP_ERR_NUMERICAL 3

// Instance exceeds the exhaustive-search cap.
#define BP_ERR_TOO_LARGE 4

// A null handle or out-of-range index was passed.
#define BP_ERR_NULL 5

// Opaque admission-control result handle.
typedef struct BpAdmission BpAdmission;

// Opaque allocation handle.
typedef struct BpAllocation BpAllocation;

// Opaque scenario handle.
typedef struct BpScenario BpScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null if none.
// The pointer stays valid until the next failing call on the same thread.
const char *bp_last_error(void);

// Parse a scenario from TOML text.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
int32_t bp_scenario_from_toml(const char *text, struct BpScenario **out);

// Load a scenario from a TOML file.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
int32_t bp_scenario_load(const char *path, struct BpScenario **out);

// Release a scenario handle. Null is ignored.
//
// # Safety
// `scenario` must come from `bp_scenario_from_toml`/`bp_scenario_load` and
// must not be used afterwards.
void bp_scenario_free(struct BpScenario *scenario);

// Number of users in the scenario, or 0 for a null handle.
//
// # Safety
// `scenario` must be a live handle or null.
size_t bp_scenario_n_users(const struct BpScenario *scenario);

// 1 if the scenario uses relays, 0 otherwise or for a null handle.
//
// # Safety
// `scenario` must be a live handle or null.
int32_t bp_scenario_has_relay(const struct BpScenario *scenario);

// 1 if every user carries a rate threshold, 0 otherwise or for null.
//
// # Safety
// `scenario` must be a live handle or null.
int32_t bp_scenario_has_thresholds(const struct BpScenario *scenario);

// Solve an allocation problem.
//
// `scheme`: 0 = OBPA (jointly optimal), 1 = EBOPA (equal bandwidth, optimal
// power), 2 = EBPA (equal bandwidth and power). `objective`: 0 = sum
// capacity, 1 = max-min, 2 = power minimization (needs thresholds).
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
int32_t bp_allocate(const struct BpScenario *scenario,
                    int32_t scheme,
                    int32_t objective,
                    struct BpAllocation **out);

// Release an allocation handle. Null is ignored.
//
// # Safety
// `allocation` must come from `bp_allocate` and must not be used afterwards.
void bp_allocation_free(struct BpAllocation *allocation);

// Objective value: sum or minimum capacity in nat/s, or total power.
//
// # Safety
// `allocation` must be a live handle or null (returns NaN for null).
double bp_allocation_value(const struct BpAllocation *allocation);

// Number of users covered by the allocation, or 0 for null.
//
// # Safety
// `allocation` must be a live handle or null.
size_t bp_allocation_n_users(const struct BpAllocation *allocation);

// Source-phase transmit power for one user.
//
// # Safety
// `allocation` must be a live handle and `out` a valid pointer.
int32_t bp_allocation_source_power(const struct BpAllocation *allocation, size_t user, double *out);

// Source-phase bandwidth for one user.
//
// # Safety
// `allocation` must be a live handle and `out` a valid pointer.
int32_t bp_allocation_source_bandwidth(const struct BpAllocation *allocation,
                                       size_t user,
                                       double *out);

// Relay-phase transmit power for one user. Fails with `BP_ERR_INVALID`
// when the allocation has no relay phase.
//
// # Safety
// `allocation` must be a live handle and `out` a valid pointer.
int32_t bp_allocation_relay_power(const struct BpAllocation *allocation, size_t user, double *out);

// Relay-phase bandwidth for one user. Fails with `BP_ERR_INVALID`
// when the allocation has no relay phase.
//
// # Safety
// `allocation` must be a live handle and `out` a valid pointer.
int32_t bp_allocation_relay_bandwidth(const struct BpAllocation *allocation,
                                      size_t user,
                                      double *out);

// Achieved capacity for one user in nat/s (min over hops when relayed).
//
// # Safety
// `allocation` must be a live handle and `out` a valid pointer.
int32_t bp_allocation_user_capacity(const struct BpAllocation *allocation,
                                    size_t user,
                                    double *out);

// Run admission control. `algorithm`: 0 = greedy, 1 = exhaustive. The
// scenario must carry per-user rate thresholds.
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
int32_t bp_admit(const struct BpScenario *scenario, int32_t algorithm, struct BpAdmission **out);

// Release an admission handle. Null is ignored.
//
// # Safety
// `admission` must come from `bp_admit` and must not be used afterwards.
void bp_admission_free(struct BpAdmission *admission);

// Number of admitted users, or 0 for null.
//
// # Safety
// `admission` must be a live handle or null.
size_t bp_admission_n_admitted(const struct BpAdmission *admission);

// Fetch the `index`-th admitted user id (ascending order).
//
// # Safety
// `admission` must be a live handle and `out` a valid pointer.
int32_t bp_admission_admitted(const struct BpAdmission *admission, size_t index, size_t *out);

// Number of users removed before admission succeeded, or 0 for null.
//
// # Safety
// `admission` must be a live handle or null.
size_t bp_admission_removals(const struct BpAdmission *admission);

// Bandwidth-oracle evaluations performed, or 0 for null.
//
// # Safety
// `admission` must be a live handle or null.
size_t bp_admission_oracle_calls(const struct BpAdmission *admission);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPALLOC_H */
