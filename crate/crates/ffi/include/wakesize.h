#ifndef WAKESIZE_H
#define WAKESIZE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_ARGUMENT = 2,
  WS_STATUS_IO = 3,
  WS_STATUS_PARSE = 4,
  WS_STATUS_SOLVER = 5,
  WS_STATUS_PANIC = 6,
  /**
   * Output buffer too small; the required length is still reported.
   */
  WS_STATUS_BUFFER_TOO_SMALL = 7,
} WsStatus;

/**
 * Outcome of a sizing run.
 */
typedef enum WsSizingStatus {
  WS_SIZING_STATUS_CONVERGED = 0,
  WS_SIZING_STATUS_INFEASIBLE = 1,
  WS_SIZING_STATUS_ITERATION_LIMIT = 2,
} WsSizingStatus;

/**
 * Grid case with wake envelopes filled in.
 */
typedef struct WsCase WsCase;

typedef struct WsScenarios WsScenarios;

typedef struct WsSolution WsSolution;

/**
 * Sizing settings. A NaN budget means no budget.
 */
typedef struct WsSizeOptions {
  double eps0;
  double g_cap;
  double budget;
  double tol_x;
  size_t max_iterations;
  size_t node_limit;
  uint64_t seed;
} WsSizeOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t ws_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ws_version(void);

/**
 * Defaults: eps0 0.05, g_cap 220 MWh, no budget, tol_x 0.1 MW, 50
 * iterations, 20000 search nodes, seed 0.
 */
struct WsSizeOptions ws_size_options_default(void);

/**
 * Loads a case JSON and fits any missing wake envelopes.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum WsStatus ws_case_load(const char *path, struct WsCase **out);

/**
 * # Safety
 * `case` must come from [`ws_case_load`] and not be used afterwards.
 */
void ws_case_free(struct WsCase *case_);

/**
 * Length of the capacity vector: wind sites, then storage power, then
 * storage energy.
 *
 * # Safety
 * `case` must be a live handle; `out` valid for writes.
 */
enum WsStatus ws_case_num_capacities(const struct WsCase *case_, size_t *out);

/**
 * Reads a scenario CSV against `case`.
 *
 * # Safety
 * `case` must be live, `path` NUL-terminated, `out` valid for writes.
 */
enum WsStatus ws_scenarios_load(const struct WsCase *case_,
                                const char *path,
                                struct WsScenarios **out);

/**
 * # Safety
 * `s` must come from [`ws_scenarios_load`] and not be used afterwards.
 */
void ws_scenarios_free(struct WsScenarios *s);

/**
 * # Safety
 * `s` must be live; `normal` and `extreme` valid for writes.
 */
enum WsStatus ws_scenarios_count(const struct WsScenarios *s, size_t *normal, size_t *extreme);

/**
 * Computes the shedding slope bounds and runs the iterative sizing.
 *
 * # Safety
 * Handles must be live, `opts` readable, `out` valid for writes.
 */
enum WsStatus ws_size(const struct WsCase *case_,
                      const struct WsScenarios *scenarios,
                      const struct WsSizeOptions *opts,
                      struct WsSolution **out);

/**
 * # Safety
 * `s` must come from [`ws_size`] and not be used afterwards.
 */
void ws_solution_free(struct WsSolution *s);

/**
 * # Safety
 * `s` must be live; `out` valid for writes.
 */
enum WsStatus ws_solution_status(const struct WsSolution *s, enum WsSizingStatus *out);

/**
 * Copies the capacities into `buf` and stores their count in `len_out`.
 * Returns `BufferTooSmall` when `len` is short; the count is still set.
 *
 * # Safety
 * `buf` must be null or valid for `len` doubles; `len_out` valid for writes.
 */
enum WsStatus ws_solution_capacities(const struct WsSolution *s,
                                     double *buf,
                                     size_t len,
                                     size_t *len_out);

/**
 * Investment (CNY) and fuel-cost term (CNY); NaN when infeasible.
 *
 * # Safety
 * `s` must be live; outputs valid for writes.
 */
enum WsStatus ws_solution_costs(const struct WsSolution *s, double *investment, double *fuel);

/**
 * Number of master solves performed.
 *
 * # Safety
 * `s` must be live; `out` valid for writes.
 */
enum WsStatus ws_solution_iterations(const struct WsSolution *s, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAKESIZE_H */
