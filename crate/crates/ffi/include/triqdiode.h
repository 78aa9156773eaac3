/* C interface to the three-qubit thermal diode engine. */

#ifndef TRIQDIODE_H
#define TRIQDIODE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum TqdStatus {
  // Success.
  TqdOk = 0,
  // A pointer argument was null.
  TqdNullPointer = 1,
  // Parameters failed validation (negative rates, bad mode value, ...).
  TqdInvalidParams = 2,
  // The requested operation needs the crossing condition, or hit a
  // non-positive transition frequency.
  TqdUnsupportedRegime = 3,
  // The linear-algebra backend could not isolate the steady state.
  TqdSolverFailure = 4,
  // A quantity was requested at a removable singularity (for example
  // crossover fractions at equal temperatures).
  TqdDegenerate = 5,
  // An internal invariant was violated.
  TqdInternal = 6,
} TqdStatus;

// Opaque handle over a validated parameter set.
typedef struct TqdSystem TqdSystem;

// Heat currents of a steady state, one entry per dissipation channel.
typedef struct TqdHeatReport {
  double qubit_a;
  double qubit_b;
  double qubit_c;
  double crossing;
  double left_direct;
  double left;
  double right;
  // 1 when the crossing dissipator was part of the generator.
  int32_t crossing_active;
} TqdHeatReport;

// Rectification factor with the forward/reverse currents behind it.
typedef struct TqdRectification {
  double forward;
  double reverse;
  double factor;
  // 0 when both currents vanish and the factor is reported as 0.
  int32_t defined;
} TqdRectification;

// Correlation measures across the (A, C) | B bipartition, in bits.
typedef struct TqdCorrelations {
  double mutual_information;
  double classical_correlation;
  double quantum_discord;
  double negativity;
} TqdCorrelations;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a system handle. `mode` is 0 for automatic dissipator
// selection, 1 to force independent left reservoirs, 2 to force the
// common reservoir. On success writes the handle to `out`; free it with
// `tqd_system_free`.
//
// # Safety
// `out` must be a valid pointer to writable memory.
enum TqdStatus tqd_system_new(double omega_a,
                              double omega_b,
                              double omega_c,
                              double g_ab,
                              double g_bc,
                              double g_ac,
                              double kappa,
                              double t_left,
                              double t_right,
                              int32_t mode,
                              struct TqdSystem **out);

// Releases a handle created by `tqd_system_new`. Null is a no-op.
//
// # Safety
// `system` must be a handle returned by `tqd_system_new` that has not
// been freed already.
void tqd_system_free(struct TqdSystem *system);

// 1 if the parameters put degenerate transitions on the common left
// reservoir (crossing dissipation active), 0 otherwise, negative status
// on error.
//
// # Safety
// `system` must be a live handle from `tqd_system_new`.
int32_t tqd_crossing_active(const struct TqdSystem *system);

// Writes the steady state to `rho_out` as 64 row-major complex entries
// (128 doubles, real part first). `fraction` selects the mixture of the
// two common-reservoir steady states and is ignored without crossing
// dissipation.
//
// # Safety
// `system` must be a live handle; `rho_out` must point to at least 128
// writable doubles.
enum TqdStatus tqd_steady_state(const struct TqdSystem *system, double fraction, double *rho_out);

// Steady-state heat currents for the given mixing fraction.
//
// # Safety
// `system` must be a live handle; `out` must be a valid pointer.
enum TqdStatus tqd_heat_report(const struct TqdSystem *system,
                               double fraction,
                               struct TqdHeatReport *out);

// Crossover fractions `p_d` (direct channel sign change) and `p_c`
// (crossing channel sign change); requires crossing dissipation.
//
// # Safety
// `system` must be a live handle; `p_d` and `p_c` must be valid
// pointers.
enum TqdStatus tqd_crossover_fractions(const struct TqdSystem *system, double *p_d, double *p_c);

// Rectification factor from the forward and temperature-swapped steady
// states at the given mixing fraction.
//
// # Safety
// `system` must be a live handle; `out` must be a valid pointer.
enum TqdStatus tqd_rectification(const struct TqdSystem *system,
                                 double fraction,
                                 struct TqdRectification *out);

// Correlation measures of the steady state across the (A, C) | B cut.
//
// # Safety
// `system` must be a live handle; `out` must be a valid pointer.
enum TqdStatus tqd_correlations(const struct TqdSystem *system,
                                double fraction,
                                struct TqdCorrelations *out);

// Static, NUL-terminated description of a status code.
const char *tqd_status_message(enum TqdStatus status);

// Static, NUL-terminated crate version string.
const char *tqd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIQDIODE_H */
