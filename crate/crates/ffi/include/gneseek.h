/* Generated by cbindgen from the gneseek-ffi crate. Do not edit. */

#ifndef GNESEEK_H
#define GNESEEK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum GneStatus {
  GNE_STATUS_OK = 0,
  GNE_STATUS_NULL_POINTER = 1,
  GNE_STATUS_INVALID_INPUT = 2,
  GNE_STATUS_DIMENSION_MISMATCH = 3,
  GNE_STATUS_INVALID_STATE = 4,
  GNE_STATUS_INFEASIBLE = 5,
  GNE_STATUS_INAPPLICABLE = 6,
  GNE_STATUS_UNSUPPORTED_FAMILY = 7,
  GNE_STATUS_COMPENSATOR_CHECK = 8,
  GNE_STATUS_DIVERGENCE = 9,
  GNE_STATUS_IO = 10,
  GNE_STATUS_PANIC = 11,
} GneStatus;

// Opaque game handle.
typedef struct GneGame GneGame;

// Opaque dynamics handle.
typedef struct GneSpec GneSpec;

// Opaque trajectory handle.
typedef struct GneTrajectory GneTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`). Returns the full message length, or 0 when no
// error was recorded.
//
// # Safety
// `buf` must be valid for `len` bytes or null.
uintptr_t gne_last_error_message(char *buf, uintptr_t len);

// Two-player zero-sum example with `F(x) = (x₂, −x₁)`.
//
// # Safety
// `out` must be a valid pointer.
enum GneStatus gne_game_zero_sum(struct GneGame **out);

// Networked Cournot benchmark drawn from `seed`.
//
// # Safety
// `out` must be a valid pointer.
enum GneStatus gne_game_cournot(uint64_t seed, struct GneGame **out);

// Sensor-network benchmark drawn from `seed`.
//
// # Safety
// `out` must be a valid pointer.
enum GneStatus gne_game_sensor(uint64_t seed, struct GneGame **out);

// Quadratic game from its JSON data form.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GneStatus gne_game_from_json(const char *json, struct GneGame **out);

// # Safety
// `game` must come from a `gne_game_*` constructor and not be used afterwards.
void gne_game_free(struct GneGame *game);

// Players, total action dimension and constraint rows.
//
// # Safety
// All pointers must be valid.
enum GneStatus gne_game_dims(const struct GneGame *game,
                             uintptr_t *players,
                             uintptr_t *n,
                             uintptr_t *m);

// Pseudo-gradient `F(x)` into `out` (both of length `n`).
//
// # Safety
// `x` and `out` must be valid for `n` doubles.
enum GneStatus gne_game_pseudo_gradient(const struct GneGame *game,
                                        const double *x,
                                        uintptr_t n,
                                        double *out);

// Variational GNE on the complete graph: `x*` (length `n`) and the common
// multiplier (length `m`).
//
// # Safety
// `x_out` must be valid for `n` doubles and `lambda_out` for `m` doubles.
enum GneStatus gne_game_solve(const struct GneGame *game,
                              double *x_out,
                              uintptr_t n,
                              double *lambda_out,
                              uintptr_t m);

// Dynamics from an experiment config (JSON). The compensator gate runs;
// a failing block yields `GNE_STATUS_COMPENSATOR_CHECK`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GneStatus gne_spec_from_config(const char *json, struct GneSpec **out);

// # Safety
// `spec` must come from [`gne_spec_from_config`] and not be used afterwards.
void gne_spec_free(struct GneSpec *spec);

// Length of the flat state, or 0 for a null handle.
//
// # Safety
// `spec` must be a valid handle or null.
uintptr_t gne_spec_dim(const struct GneSpec *spec);

// Time derivative at `s` (both buffers of length `len`).
//
// # Safety
// `s` and `out` must be valid for `len` doubles.
enum GneStatus gne_spec_field(const struct GneSpec *spec,
                              const double *s,
                              uintptr_t len,
                              double *out);

// One projected-Euler step of size `h`.
//
// # Safety
// `s` and `out` must be valid for `len` doubles.
enum GneStatus gne_spec_step(const struct GneSpec *spec,
                             const double *s,
                             uintptr_t len,
                             double h,
                             double *out);

// Integrates from `s0` with projected Euler.
//
// # Safety
// `s0` must be valid for `len` doubles and `out` a valid pointer.
enum GneStatus gne_spec_integrate(const struct GneSpec *spec,
                                  const double *s0,
                                  uintptr_t len,
                                  double h,
                                  double horizon,
                                  uintptr_t record_stride,
                                  struct GneTrajectory **out);

// Number of recorded states.
//
// # Safety
// `traj` must be a valid handle or null.
uintptr_t gne_trajectory_len(const struct GneTrajectory *traj);

// Terminal reason: 0 horizon, 1 residual, 2 divergence; -1 for null.
//
// # Safety
// `traj` must be a valid handle or null.
int32_t gne_trajectory_terminal_reason(const struct GneTrajectory *traj);

// Copies the last state reached (length `len`) and its time.
//
// # Safety
// `out` must be valid for `len` doubles; `time` may be null.
enum GneStatus gne_trajectory_final_state(const struct GneTrajectory *traj,
                                          double *out,
                                          uintptr_t len,
                                          double *time);

// # Safety
// `traj` must come from [`gne_spec_integrate`] and not be used afterwards.
void gne_trajectory_free(struct GneTrajectory *traj);

// Runs an experiment config in memory and returns its summary as a JSON
// string, to be released with [`gne_string_free`].
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GneStatus gne_run_config(const char *json, char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void gne_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GNESEEK_H */
