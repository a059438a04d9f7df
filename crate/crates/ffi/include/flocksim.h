#ifndef FLOCKSIM_H
#define FLOCKSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of a call.
 */
typedef enum FlocksimStatus {
  FLOCKSIM_STATUS_OK = 0,
  FLOCKSIM_STATUS_NULL_POINTER = 1,
  FLOCKSIM_STATUS_INVALID_UTF8 = 2,
  FLOCKSIM_STATUS_PARSE = 3,
  FLOCKSIM_STATUS_RUNTIME = 4,
  FLOCKSIM_STATUS_BUDGET = 5,
  FLOCKSIM_STATUS_OUT_OF_RANGE = 6,
  FLOCKSIM_STATUS_PANIC = 7,
} FlocksimStatus;

/*
 Finished run of the slow-merging path construction.
 */
typedef struct FlocksimLowerBound FlocksimLowerBound;

/*
 A parsed configuration together with its latest run.
 */
typedef struct FlocksimSim FlocksimSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *flocksim_last_error(void);

/*
 Library version as a static string.
 */
const char *flocksim_version(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a pointer returned by this library that was not freed yet.
 */
void flocksim_string_free(char *s);

/*
 Parses a TOML configuration into a new handle.

 # Safety
 `toml` must be a NUL-terminated string and `out` a writable pointer.
 */
enum FlocksimStatus flocksim_sim_new(const char *toml, struct FlocksimSim **out);

/*
 # Safety
 `sim` must be null or a handle from [`flocksim_sim_new`] that was not freed yet.
 */
void flocksim_sim_free(struct FlocksimSim *sim);

/*
 Runs from the initial configuration to `horizon`; `budget` 0 means unlimited.
 Returns `Budget` (keeping the partial run) when the budget stops it early.

 # Safety
 `sim` must be a live handle.
 */
enum FlocksimStatus flocksim_sim_run(struct FlocksimSim *sim, uint64_t horizon, uint64_t budget);

/*
 Birds, dimension and current tick; any output pointer may be null.

 # Safety
 `sim` must be a live handle; non-null outputs must be writable.
 */
enum FlocksimStatus flocksim_sim_shape(const struct FlocksimSim *sim,
                                       uintptr_t *n,
                                       uintptr_t *d,
                                       uint64_t *tick);

/*
 Position of `bird` along `axis`, rounded to a double.

 # Safety
 `sim` must be a live handle and `out` writable.
 */
enum FlocksimStatus flocksim_sim_position(const struct FlocksimSim *sim,
                                          uintptr_t bird,
                                          uintptr_t axis,
                                          double *out);

/*
 Velocity of `bird` along `axis`, rounded to a double.

 # Safety
 `sim` must be a live handle and `out` writable.
 */
enum FlocksimStatus flocksim_sim_velocity(const struct FlocksimSim *sim,
                                          uintptr_t bird,
                                          uintptr_t axis,
                                          double *out);

/*
 Exact position text (`"p/q"` in exact mode); free with [`flocksim_string_free`].

 # Safety
 `sim` must be a live handle and `out` writable.
 */
enum FlocksimStatus flocksim_sim_position_text(const struct FlocksimSim *sim,
                                               uintptr_t bird,
                                               uintptr_t axis,
                                               char **out);

/*
 Records, switches and network period (0 when none) of the last run.

 # Safety
 `sim` must be a live handle; non-null outputs must be writable.
 */
enum FlocksimStatus flocksim_sim_switches(const struct FlocksimSim *sim,
                                          uintptr_t *records,
                                          uintptr_t *switches,
                                          uint64_t *period);

/*
 Writes the last run's trace as line-delimited JSON.

 # Safety
 `sim` must be a live handle and `path` a NUL-terminated string.
 */
enum FlocksimStatus flocksim_sim_write_trace(const struct FlocksimSim *sim, const char *path);

/*
 Runs the construction for `n` birds with drift unit `1/q_den`; `stop_height` 0 picks
 the highest height the budget allows.

 # Safety
 `out` must be writable.
 */
enum FlocksimStatus flocksim_lowerbound_run(uintptr_t n,
                                            uint64_t q_den,
                                            uint64_t lag,
                                            uint64_t budget,
                                            uint32_t stop_height,
                                            struct FlocksimLowerBound **out);

/*
 # Safety
 `lb` must be null or a handle from [`flocksim_lowerbound_run`] that was not freed yet.
 */
void flocksim_lowerbound_free(struct FlocksimLowerBound *lb);

/*
 Ticks between the merges forming heights `j` and `j + 1`.

 # Safety
 `lb` must be a live handle and `out` writable.
 */
enum FlocksimStatus flocksim_lowerbound_theta(const struct FlocksimLowerBound *lb,
                                              uint32_t j,
                                              uint64_t *out);

/*
 Full report as JSON; free with [`flocksim_string_free`].

 # Safety
 `lb` must be a live handle.
 */
char *flocksim_lowerbound_json(const struct FlocksimLowerBound *lb);

/*
 Eigenvalues, descending, of the averaging matrix on a path of `birds` birds.
 `policy` is `"vicsek"` or `"lazy"`; `out` must hold `birds` doubles.

 # Safety
 `policy` must be a NUL-terminated string and `out` point to `len` writable doubles.
 */
enum FlocksimStatus flocksim_path_spectrum(uintptr_t birds,
                                           const char *policy,
                                           double *out,
                                           uintptr_t len);

/*
 Evaluates the canonical combination tree with `2^k` leaves and returns the polynomial
 as text; free with [`flocksim_string_free`].

 # Safety
 `out` must be writable.
 */
enum FlocksimStatus flocksim_residue_canonical(uint32_t k, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOCKSIM_H */
