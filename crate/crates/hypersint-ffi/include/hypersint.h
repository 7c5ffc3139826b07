#ifndef HYPERSINT_H
#define HYPERSINT_H

#include <stdint.h>
#include <stddef.h>

// Result codes.
typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NULL_POINTER = 1,
  HS_STATUS_INVALID_PARAMS = 2,
  HS_STATUS_NO_BOUND_STATE = 3,
  HS_STATUS_OUT_OF_WINDOW = 4,
  HS_STATUS_SOLVER_FAILURE = 5,
  HS_STATUS_QUADRATURE_FAILURE = 6,
  HS_STATUS_NUMERICAL = 7,
  HS_STATUS_BUFFER_TOO_SMALL = 8,
  HS_STATUS_PANIC = 9,
} HsStatus;

// Parabolic chart of the first potential.
typedef enum HsParabolicChart {
  HS_PARABOLIC_CHART_ELLIPTIC = 0,
  HS_PARABOLIC_CHART_HYPERBOLIC = 1,
} HsParabolicChart;

// Which interbasis computation to use.
typedef enum HsWMethod {
  HS_W_METHOD_QUADRATURE = 0,
  HS_W_METHOD_HYP3F2 = 1,
  HS_W_METHOD_HAHN = 2,
} HsWMethod;

// Parameters of the first potential.
typedef struct HsP1Params HsP1Params;

// A normalized eigenstate of the first potential.
typedef struct HsP1State HsP1State;

// Parameters of the second potential.
typedef struct HsP2Params HsP2Params;

// A normalized equidistant eigenstate of the second potential.
typedef struct HsP2State HsP2State;

// All root configurations of one parabolic level.
typedef struct HsRootSet HsRootSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hs_version(void);

// Copy the last error message of this thread into `buf` (NUL-terminated,
// truncated to `cap`). Returns the full message length without the NUL,
// or 0 when there is no error.
//
// # Safety
// `buf` must be null or valid for `cap` bytes.
size_t hs_last_error_message(char *buf, size_t cap);

// Create parameters of the first potential.
//
// # Safety
// `out` must be valid for writes.
enum HsStatus hs_p1_params_new(double alpha, double beta, double gamma, struct HsP1Params **out);

// # Safety
// `p` must be null or a handle from `hs_p1_params_new`, freed once.
void hs_p1_params_free(struct HsP1Params *p);

// Highest bound level, or -1 when there are no bound states.
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_nmax(const struct HsP1Params *p, int64_t *out);

// Energy of level `n`.
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_energy(const struct HsP1Params *p, size_t n, double *out);

// Equidistant state with quantum numbers (n, m).
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_state_equidistant(const struct HsP1Params *p,
                                      size_t n,
                                      size_t m,
                                      struct HsP1State **out);

// Horicyclic state with quantum numbers (n1, n2).
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_state_horicyclic(const struct HsP1Params *p,
                                     size_t n1,
                                     size_t n2,
                                     struct HsP1State **out);

// Parabolic state for configuration `j` of a root set.
//
// # Safety
// `set` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_state_parabolic(const struct HsRootSet *set, size_t j, struct HsP1State **out);

// # Safety
// `s` must be null or a state handle, freed once.
void hs_p1_state_free(struct HsP1State *s);

// Wavefunction value at coordinates (u1, u2) of the state's own chart.
//
// # Safety
// `s` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_state_eval(const struct HsP1State *s, double u1, double u2, double *out);

// Solve the zero equations of level `n` in a parabolic chart.
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p1_roots(const struct HsP1Params *p,
                          enum HsParabolicChart chart,
                          size_t n,
                          double tol,
                          uint64_t seed,
                          struct HsRootSet **out);

// # Safety
// `s` must be null or a root-set handle, freed once.
void hs_root_set_free(struct HsRootSet *s);

// Number of configurations in the set.
//
// # Safety
// `s` must be a live handle and `out` valid for writes.
enum HsStatus hs_root_set_len(const struct HsRootSet *s, size_t *out);

// Roots of configuration `j` into `buf` (capacity `cap`), its residual and
// separation constant (λ for elliptic, τ for hyperbolic). `len_out`
// receives the number of roots even when the buffer is too small.
//
// # Safety
// Handles must be live, `buf` valid for `cap` doubles, outputs valid for writes.
enum HsStatus hs_root_set_get(const struct HsRootSet *s,
                              size_t j,
                              double *buf,
                              size_t cap,
                              size_t *len_out,
                              double *residual_out,
                              double *constant_out);

// Interbasis matrix of level `n`, row-major with rows n1 and columns m,
// into `buf` of capacity `cap` (at least (n+1)²).
//
// # Safety
// `p` must be a live handle and `buf` valid for `cap` doubles.
enum HsStatus hs_p1_interbasis(const struct HsP1Params *p,
                               size_t n,
                               enum HsWMethod method,
                               double *buf,
                               size_t cap);

// Create parameters of the second potential.
//
// # Safety
// `out` must be valid for writes.
enum HsStatus hs_p2_params_new(double alpha, double beta, double gamma, struct HsP2Params **out);

// # Safety
// `p` must be null or a handle from `hs_p2_params_new`, freed once.
void hs_p2_params_free(struct HsP2Params *p);

// Highest bound level, or -1 when there are no bound states.
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p2_nmax(const struct HsP2Params *p, int64_t *out);

// Energy of level `n`.
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p2_energy(const struct HsP2Params *p, size_t n, double *out);

// Equidistant state with quantum numbers (n, m).
//
// # Safety
// `p` must be a live handle and `out` valid for writes.
enum HsStatus hs_p2_state_equidistant(const struct HsP2Params *p,
                                      size_t n,
                                      size_t m,
                                      struct HsP2State **out);

// # Safety
// `s` must be null or a state handle, freed once.
void hs_p2_state_free(struct HsP2State *s);

// Complex wavefunction value at equidistant coordinates (τ1, τ2).
//
// # Safety
// `s` must be a live handle and the outputs valid for writes.
enum HsStatus hs_p2_state_eval(const struct HsP2State *s,
                               double u1,
                               double u2,
                               double *re_out,
                               double *im_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERSINT_H */
