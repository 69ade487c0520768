#ifndef RMOM_H
#define RMOM_H

#include <stddef.h>
#include <stdint.h>

typedef enum RmomStatus {
  RMOM_STATUS_OK = 0,
  RMOM_STATUS_NULL_POINTER = 1,
  RMOM_STATUS_USAGE = 2,
  RMOM_STATUS_NUMERICAL = 3,
  RMOM_STATUS_BUFFER_TOO_SMALL = 4,
  RMOM_STATUS_PANIC = 5,
} RmomStatus;

/**
 * Opaque density matrix.
 */
typedef struct RmomState RmomState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next rmom call on the same thread.
 */
const char *rmom_last_error(void);

/**
 * Builds a state from row-major real and imaginary parts of length
 * `prod(dims)^2`. `im` may be null for a real matrix.
 *
 * # Safety
 * `dims` must point to `n_dims` values and `re`/`im` to `prod(dims)^2` values.
 */
enum RmomStatus rmom_state_from_matrix(const size_t *dims,
                                       size_t n_dims,
                                       const double *re,
                                       const double *im,
                                       struct RmomState **out);

/**
 * Builds a state from JSON: `{"name":..,"params":{..}}` for a named state or
 * `{"dims":[..],"re":[..],"im":[..]}` for a raw matrix.
 *
 * # Safety
 * `json` must be a NUL-terminated string.
 */
enum RmomStatus rmom_state_from_json(const char *json, struct RmomState **out);

/**
 * # Safety
 * `state` must come from `rmom_state_from_*` and not be freed twice. Null is ignored.
 */
void rmom_state_free(struct RmomState *state);

/**
 * Total Hilbert-space dimension and number of parties.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_state_shape(const struct RmomState *state, size_t *dim, size_t *n_parties);

/**
 * Sector lengths A_0..A_n written to `out`; `written` receives n+1.
 * Returns `BufferTooSmall` (with `written` set) if `cap` < n+1.
 *
 * # Safety
 * `out` must have room for `cap` values.
 */
enum RmomStatus rmom_sector_lengths(const struct RmomState *state,
                                    double *out,
                                    size_t cap,
                                    size_t *written);

/**
 * Analytic randomized-measurement moments S2 and S4 of a d x d state.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_moments(const struct RmomState *state, double *s2, double *s4);

/**
 * Smallest eigenvalue of the partial transpose on the second party.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_ppt_min_eig(const struct RmomState *state, double *out);

/**
 * Trace norm of the realigned matrix.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_ccnr_norm(const struct RmomState *state, double *out);

/**
 * Trace norm of the correlation matrix.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_dv_norm(const struct RmomState *state, double *out);

/**
 * Full detection report as a JSON string, released with `rmom_string_free`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_analyze_json(const struct RmomState *state, char **out);

/**
 * # Safety
 * `s` must come from this library. Null is ignored.
 */
void rmom_string_free(char *s);

/**
 * Range of S4 over separable d x d states with the given S2 (0 <= s2 <= 1).
 *
 * # Safety
 * Pointers must be valid.
 */
enum RmomStatus rmom_sep_region(double s2, size_t d, double *s4_min, double *s4_max);

/**
 * Monte Carlo estimates of the second and fourth randomized-measurement
 * moments with standard errors. `out` receives [r2, r2_err, r4, r4_err].
 *
 * # Safety
 * `out` must have room for 4 values.
 */
enum RmomStatus rmom_mc_moments(const struct RmomState *state,
                                size_t samples,
                                uint64_t seed,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RMOM_H */
