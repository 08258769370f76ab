#ifndef TRIPARTITE_H
#define TRIPARTITE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  TP_STATUS_OK = 0,
  TP_STATUS_NULL_POINTER = 1,
  TP_STATUS_INVALID_ARGUMENT = 2,
  TP_STATUS_NOT_NORMALIZED = 3,
  TP_STATUS_WRONG_FAMILY = 4,
  TP_STATUS_NUMERICAL = 5,
  TP_STATUS_PANIC = 6,
} TpStatus;

/**
 * Closed-form branch reported by [`tp_smax_closed`].
 */
typedef enum {
  TP_BRANCH_NONE = 0,
  TP_BRANCH_LOW = 1,
  TP_BRANCH_HIGH = 2,
} TpBranch;

/**
 * Opaque three-qubit pure state.
 */
typedef struct TpState TpState;

typedef struct {
  double tau;
  double c12;
  double c23;
  double c31;
  double c1_23;
  double c2_13;
  double c3_12;
  double monogamy_residual;
} TpProfile;

/**
 * Six measurement directions in the order a, a', b, b', c, c'.
 */
typedef struct {
  double polar[6];
  double azimuth[6];
} TpSettings;

typedef struct {
  double mean;
  double stderr;
} TpEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * GHZ-class state with `theta, theta3` in `[0, pi/2]`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
TpStatus tp_state_new_ghz(double theta, double theta3, TpState **out);

/**
 * W-class state with non-negative, normalized amplitudes.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
TpStatus tp_state_new_w(double alpha, double beta, double gamma, TpState **out);

/**
 * State from 16 doubles: the real and imaginary parts of the amplitudes of
 * `|000>, |001>, ..., |111>`, interleaved.
 *
 * # Safety
 * `re_im` must point to 16 readable doubles and `out` must be valid for
 * writing one pointer.
 */
TpStatus tp_state_new_raw(const double *re_im, bool normalize, TpState **out);

/**
 * Release a handle; null is ignored.
 *
 * # Safety
 * `state` must be null or a handle from a constructor that was not yet
 * freed.
 */
void tp_state_free(TpState *state);

/**
 * Entanglement profile, in closed form for family states.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for writing.
 */
TpStatus tp_state_profile(const TpState *state, TpProfile *out);

/**
 * `|<S>|` at the given settings.
 *
 * # Safety
 * `state` must be a live handle, `settings` readable and `out` writable.
 */
TpStatus tp_svetlichny_value(const TpState *state, const TpSettings *settings, double *out);

/**
 * Multistart maximum of `|<S>|`; `out_settings` may be null.
 *
 * # Safety
 * `state` must be a live handle, `out_value` writable and `out_settings`
 * null or writable.
 */
TpStatus tp_maximize(const TpState *state,
                     uint32_t n_starts,
                     uint64_t seed,
                     double *out_value,
                     TpSettings *out_settings);

/**
 * Closed-form maximum for states built from family parameters; fails with
 * `WrongFamily` for raw states. `out_branch` is `Low`/`High` for GHZ-class
 * states and `None` for W-class ones, and may be null.
 *
 * # Safety
 * `state` must be a live handle, `out_value` writable and `out_branch`
 * null or writable.
 */
TpStatus tp_smax_closed(const TpState *state, double *out_value, TpBranch *out_branch);

/**
 * Finite-shot estimate of `<S>` with `shots` per correlator.
 *
 * # Safety
 * `state` must be a live handle, `settings` readable and `out` writable.
 */
TpStatus tp_estimate_svetlichny(const TpState *state,
                                const TpSettings *settings,
                                uint64_t shots,
                                uint64_t seed,
                                TpEstimate *out);

/**
 * Message of the last failure on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the thread.
 */
const char *tp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIPARTITE_H */
