#ifndef QSINGLET_H
#define QSINGLET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QsStatus {
  QS_STATUS_OK = 0,
  // A required pointer argument was null.
  QS_STATUS_NULL_POINTER = 1,
  // Malformed argument: bad UTF-8, unknown parameter, non-finite entry.
  QS_STATUS_INVALID_INPUT = 2,
  // Not a valid channel or state.
  QS_STATUS_INVALID_CHANNEL = 3,
  QS_STATUS_UNKNOWN_CHANNEL = 4,
  QS_STATUS_PARAMETER_OUT_OF_RANGE = 5,
  // A panic was caught at the boundary.
  QS_STATUS_INTERNAL = 6,
} QsStatus;

// Opaque channel handle.
typedef struct QsChannel QsChannel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Owned by the
// library; valid until the next failing call on the same thread.
const char *qs_last_error_message(void);

// Build a named channel (`amplitude_damping`, `depolarizing`, ...).
//
// `keys` and `values` hold `n_params` parameter names and values; both may be
// null when `n_params` is zero.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum QsStatus qs_channel_named(const char *name,
                               const char *const *keys,
                               const double *values,
                               size_t n_params,
                               struct QsChannel **out);

// Build a channel from `n_ops` Kraus operators, each 8 doubles
// (row-major 2×2, interleaved `re, im`). Trace preservation is not
// checked here; see `qs_channel_validate`.
//
// # Safety
// `data` must hold `8 * n_ops` doubles; `out` must be writable.
enum QsStatus qs_channel_kraus(const double *data, size_t n_ops, struct QsChannel **out);

// # Safety
// `ch` must come from a constructor in this library and not be used again.
void qs_channel_free(struct QsChannel *ch);

// Number of stored Kraus operators.
//
// # Safety
// `ch` must be a live handle; `out` must be writable.
enum QsStatus qs_channel_kraus_count(const struct QsChannel *ch, size_t *out);

// Trace-preservation residual and smallest Choi eigenvalue; `ok` is 1 when
// both are within `tol`.
//
// # Safety
// `ch` must be a live handle; output pointers must be writable.
enum QsStatus qs_channel_validate(const struct QsChannel *ch,
                                  double tol,
                                  double *tp_residual,
                                  double *cp_min_eigenvalue,
                                  int32_t *ok);

// Optimal one-shot singlet fraction `max(½, λ_max)` of the Choi state.
//
// # Safety
// `ch` must be a live handle; output pointers must be writable.
enum QsStatus qs_optimal_singlet_fraction(const struct QsChannel *ch,
                                          double *value,
                                          double *lambda_max,
                                          int32_t *entanglement_breaking);

// Optimal input state (8 doubles, amplitudes of |00⟩..|11⟩), its larger
// Schmidt coefficient and whether the top eigenvalue is degenerate.
//
// # Safety
// `ch` must be a live handle; `state` must hold 8 doubles.
enum QsStatus qs_optimal_input(const struct QsChannel *ch,
                               double *state,
                               double *schmidt_lambda,
                               int32_t *degenerate);

// Channel negativity maximised over pure inputs (seeded multistart).
//
// # Safety
// `ch` must be a live handle; `value` must be writable.
enum QsStatus qs_channel_negativity(const struct QsChannel *ch, uint64_t seed, double *value);

// Singlet fraction reachable by trace-preserving LOCC from the Choi state.
//
// # Safety
// `ch` must be a live handle; `value` must be writable.
enum QsStatus qs_fstar_choi(const struct QsChannel *ch, double *value);

// Singlet fraction reachable by trace-preserving LOCC from a two-qubit
// density matrix given as 32 doubles (row-major 4×4, interleaved).
//
// # Safety
// `rho` must hold 32 doubles; `value` must be writable.
enum QsStatus qs_fstar_state(const double *rho, double *value);

// Full analysis as a JSON document. Release with `qs_string_free`.
//
// # Safety
// `ch` must be a live handle; `out` must be writable.
enum QsStatus qs_report_json(const struct QsChannel *ch, uint64_t seed, char **out);

// # Safety
// `s` must come from `qs_report_json` and not be used again.
void qs_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSINGLET_H */
