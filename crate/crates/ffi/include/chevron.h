/* C interface to the chevron-pattern simulation toolkit. Generated by cbindgen; do not edit. */

#ifndef CHEVRON_H
#define CHEVRON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. `CHEVRON_STATUS_OK` is zero.
 */
typedef enum ChevronStatus {
  CHEVRON_STATUS_OK = 0,
  CHEVRON_STATUS_NULL_POINTER = 1,
  CHEVRON_STATUS_INVALID_ARGUMENT = 2,
  CHEVRON_STATUS_GRID_MISMATCH = 3,
  CHEVRON_STATUS_BLOW_UP = 4,
  CHEVRON_STATUS_REGIME = 5,
  CHEVRON_STATUS_NOT_AN_EQUILIBRIUM = 6,
  CHEVRON_STATUS_DIVERGENCE = 7,
  CHEVRON_STATUS_IO = 8,
  CHEVRON_STATUS_FORMAT = 9,
  CHEVRON_STATUS_BUFFER_TOO_SMALL = 10,
  CHEVRON_STATUS_PANIC = 11,
} ChevronStatus;

typedef enum ChevronScheme {
  CHEVRON_SCHEME_RK4 = 0,
  CHEVRON_SCHEME_IMEX = 1,
} ChevronScheme;

typedef enum ChevronSystem {
  CHEVRON_SYSTEM_UNIFORM = 0,
  CHEVRON_SYSTEM_PHASE_GRAD = 1,
} ChevronSystem;

typedef enum ChevronKind {
  CHEVRON_KIND_SADDLE = 0,
  CHEVRON_KIND_SPIRAL_SINK = 1,
  CHEVRON_KIND_SPIRAL_SOURCE = 2,
  CHEVRON_KIND_NODE_SINK = 3,
  CHEVRON_KIND_NODE_SOURCE = 4,
  CHEVRON_KIND_CENTER_MARGINAL = 5,
  CHEVRON_KIND_DEGENERATE = 6,
} ChevronKind;

/*
 Opaque simulation handle.
 */
typedef struct ChevronSim ChevronSim;

/*
 Coefficients of the PDE system.
 */
typedef struct ChevronParams {
  double tau;
  double d1;
  double d2;
  double c1;
  double c2;
  double h;
  double beta;
} ChevronParams;

/*
 Energy diagnostics of the current state. `bound` is anchored at the state
 the simulation was last initialized with; NaN outside the dissipative regimes.
 */
typedef struct ChevronEnergy {
  double t;
  double norm_a_sq;
  double norm_phi_sq;
  double grad_a_sq;
  double grad_phi_sq;
  double l4_a;
  double lyapunov;
  double bound;
} ChevronEnergy;

/*
 Coefficients of the reduced ODEs.
 */
typedef struct ChevronReducedParams {
  double tau;
  double c1;
  double c2;
  double h;
  double chi;
} ChevronReducedParams;

typedef struct ChevronFixedPoint {
  double rho;
  double phi;
  double re_l1;
  double im_l1;
  double re_l2;
  double im_l2;
  enum ChevronKind kind;
} ChevronFixedPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *chevron_version(void);

/*
 Message of the last failed call on this thread ("" after a success).
 Valid until the next library call on the same thread.
 */
const char *chevron_last_error_message(void);

/*
 Writes the default coefficients to `out`.

 # Safety
 `out` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_params_default(struct ChevronParams *out);

/*
 Creates a simulation on an `nx` x `ny` interior grid over `[0, lx] x [0, ly]`,
 starting from the zero state at `t = 0`. `dt <= 0` selects the step from the
 stability heuristic, re-evaluated whenever the state is (re)initialized.

 # Safety
 `params` must be NULL or point to a valid struct; `out` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_sim_new(const struct ChevronParams *params,
                                   size_t nx,
                                   size_t ny,
                                   double lx,
                                   double ly,
                                   enum ChevronScheme scheme,
                                   double dt,
                                   struct ChevronSim **out);

/*
 Releases a simulation. NULL is ignored.

 # Safety
 `sim` must be NULL or a handle from [`chevron_sim_new`] not yet freed.
 */
void chevron_sim_free(struct ChevronSim *sim);

/*
 Resets to the zero state at `t = 0`.

 # Safety
 `sim` must be NULL or a live handle.
 */
enum ChevronStatus chevron_sim_init_zero(struct ChevronSim *sim);

/*
 Seeded random initial data of the given amplitude (same generator as the CLI).

 # Safety
 `sim` must be NULL or a live handle.
 */
enum ChevronStatus chevron_sim_init_random(struct ChevronSim *sim, uint64_t seed, double amplitude);

/*
 `A = amplitude sin(kx pi x / lx) sin(ky pi y / ly)`, `phi = 0`.

 # Safety
 `sim` must be NULL or a live handle.
 */
enum ChevronStatus chevron_sim_init_single_mode(struct ChevronSim *sim,
                                                uint32_t kx,
                                                uint32_t ky,
                                                double amplitude);

/*
 Replaces the state with caller data: `phi` holds `nx*ny` values, `a`
 holds `2*nx*ny` interleaved values.

 # Safety
 `phi` and `a` must be valid for reads of the stated lengths.
 */
enum ChevronStatus chevron_sim_set_fields(struct ChevronSim *sim,
                                          const double *phi,
                                          size_t phi_len,
                                          const double *a,
                                          size_t a_len,
                                          double t);

/*
 Advances `n_steps` steps of the configured size.

 # Safety
 `sim` must be NULL or a live handle.
 */
enum ChevronStatus chevron_sim_step(struct ChevronSim *sim, uint64_t n_steps);

/*
 Advances to exactly `t_end`, shortening the last step.

 # Safety
 `sim` must be NULL or a live handle.
 */
enum ChevronStatus chevron_sim_run(struct ChevronSim *sim, double t_end);

/*
 # Safety
 `t` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_sim_time(const struct ChevronSim *sim, double *t);

/*
 The configured or automatically selected step.

 # Safety
 `dt` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_sim_dt(const struct ChevronSim *sim, double *dt);

/*
 Grid dimensions `(nx, ny)`; buffers passed to the field functions hold `nx*ny` nodes.

 # Safety
 `nx` and `ny` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_sim_shape(const struct ChevronSim *sim, size_t *nx, size_t *ny);

/*
 # Safety
 `out` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_sim_energy(const struct ChevronSim *sim, struct ChevronEnergy *out);

/*
 Copies the fields out. Either buffer may be NULL to skip it; a non-NULL
 buffer must hold `nx*ny` (phi) or `2*nx*ny` (A) values.

 # Safety
 Non-NULL buffers must be valid for writes of the stated lengths.
 */
enum ChevronStatus chevron_sim_copy_fields(const struct ChevronSim *sim,
                                           double *phi,
                                           size_t phi_len,
                                           double *a,
                                           size_t a_len);

/*
 Writes the current state in the CHEV1 snapshot format.

 # Safety
 `path` must be NULL or a NUL-terminated string.
 */
enum ChevronStatus chevron_sim_save_snapshot(const struct ChevronSim *sim, const char *path);

/*
 Replaces the state with a snapshot taken on the same grid.

 # Safety
 `path` must be NULL or a NUL-terminated string.
 */
enum ChevronStatus chevron_sim_load_snapshot(struct ChevronSim *sim, const char *path);

/*
 Equilibria with `rho >= 0`. Writes up to `capacity` points to `out` and the
 total number to `count`; returns `CHEVRON_STATUS_BUFFER_TOO_SMALL` if
 `capacity < *count` (the first `capacity` points are still written).
 `out` may be NULL when `capacity` is 0, to query the count.

 # Safety
 `params` must be valid; `out` valid for `capacity` writes; `count` valid for writes.
 */
enum ChevronStatus chevron_fixed_points(enum ChevronSystem system,
                                        const struct ChevronReducedParams *params,
                                        struct ChevronFixedPoint *out,
                                        size_t capacity,
                                        size_t *count);

/*
 `1/sqrt(1 - c1^2)` for `|c1| < 1`. For `|c1| >= 1` there is no critical
 gradient: returns `CHEVRON_STATUS_REGIME` and writes infinity.

 # Safety
 `out` must be NULL or valid for writes.
 */
enum ChevronStatus chevron_critical_chi(double c1, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEVRON_H */
