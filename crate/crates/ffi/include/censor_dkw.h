#ifndef CENSOR_DKW_H
#define CENSOR_DKW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdkwStatus {
  CDKW_STATUS_OK = 0,
  CDKW_STATUS_NULL_POINTER = 1,
  CDKW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The requested confidence cannot be reached for any `eta <= 1`.
   */
  CDKW_STATUS_UNREACHABLE = 3,
  /**
   * The simulation has processed every arrival.
   */
  CDKW_STATUS_FINISHED = 4,
  CDKW_STATUS_BUFFER_TOO_SMALL = 5,
  CDKW_STATUS_INTERNAL = 6,
} CdkwStatus;

typedef enum CdkwRegion {
  CDKW_REGION_CENSORED = 0,
  CDKW_REGION_EXPLORE = 1,
  CDKW_REGION_DISCLOSED = 2,
} CdkwRegion;

typedef struct CdkwEcdf CdkwEcdf;

typedef struct CdkwSimulation CdkwSimulation;

typedef struct CdkwBound {
  double raw;
  double probability;
  bool trivial;
} CdkwBound;

/**
 * One processed arrival. `label` is -1 when the label stayed hidden and
 * `coin` is NaN outside the exploration band.
 */
typedef struct CdkwArrival {
  uint64_t t;
  double score;
  int32_t label;
  bool admitted;
  enum CdkwRegion region;
  double coin;
} CdkwArrival;

typedef struct CdkwTally {
  uint64_t censored;
  uint64_t explore;
  uint64_t disclosed;
  uint64_t explore_admitted;
  uint64_t admitted_label0;
  uint64_t admitted_label1;
} CdkwTally;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `len` bytes. Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t cdkw_last_error(char *buf, size_t len);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_dkw_bound(uint64_t n, double eta, struct CdkwBound *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum CdkwStatus cdkw_dkw_eta(uint64_t n, double delta, double *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_gc_bound(uint64_t n, double eta, struct CdkwBound *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_vc_bound(uint64_t n, double eta, uint32_t d, struct CdkwBound *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_hoeffding_bound(uint64_t n, double eta, struct CdkwBound *out);

/**
 * Threshold-only bound: `m` of `n` initial samples below the threshold,
 * `k` new samples above it, true mass `alpha` below it.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_two_region_bound(uint64_t n,
                                      uint64_t m,
                                      uint64_t k,
                                      double alpha,
                                      double eta,
                                      struct CdkwBound *out);

/**
 * Threshold-only bound averaged over the number of disclosed samples
 * among `wait` future arrivals.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_apriori_bound(uint64_t n,
                                   uint64_t m,
                                   double alpha,
                                   double eta,
                                   uint64_t wait,
                                   struct CdkwBound *out);

/**
 * Bound with an exploration band: `l` initial samples below its lower edge,
 * `k1` admitted in the band with probability `epsilon`, `k2` above the
 * threshold; `beta` is the true mass below the band.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_three_region_bound(uint64_t n,
                                        uint64_t m,
                                        uint64_t l,
                                        uint64_t k1,
                                        uint64_t k2,
                                        double alpha,
                                        double beta,
                                        double epsilon,
                                        double eta,
                                        struct CdkwBound *out);

/**
 * Two-dimensional counterpart of [`cdkw_two_region_bound`] for a linear boundary.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_two_region_bound_2d(uint64_t n,
                                         uint64_t m,
                                         uint64_t k,
                                         double alpha,
                                         double eta,
                                         struct CdkwBound *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `CdkwBound`.
 */
enum CdkwStatus cdkw_three_region_bound_2d(uint64_t n,
                                           uint64_t m,
                                           uint64_t l,
                                           uint64_t k1,
                                           uint64_t k2,
                                           double alpha,
                                           double beta,
                                           double epsilon,
                                           double eta,
                                           struct CdkwBound *out);

/**
 * Smallest `eta` whose threshold-only bound is at most `delta`.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum CdkwStatus cdkw_two_region_eta(uint64_t n,
                                    uint64_t m,
                                    uint64_t k,
                                    double alpha,
                                    double delta,
                                    double *out);

/**
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum CdkwStatus cdkw_three_region_eta(uint64_t n,
                                      uint64_t m,
                                      uint64_t l,
                                      uint64_t k1,
                                      uint64_t k2,
                                      double alpha,
                                      double beta,
                                      double epsilon,
                                      double delta,
                                      double *out);

/**
 * Builds an empirical CDF from `len` scores (copied).
 *
 * # Safety
 * `scores` must be valid for `len` reads; `out` must be null or writable.
 */
enum CdkwStatus cdkw_ecdf_new(const double *scores, size_t len, struct CdkwEcdf **out);

/**
 * # Safety
 * `ecdf` must be a live handle from [`cdkw_ecdf_new`]; `out` must be writable.
 */
enum CdkwStatus cdkw_ecdf_eval(const struct CdkwEcdf *ecdf, double x, double *out);

/**
 * # Safety
 * `ecdf` must be a live handle from [`cdkw_ecdf_new`]; `out` must be writable.
 */
enum CdkwStatus cdkw_ecdf_len(const struct CdkwEcdf *ecdf, size_t *out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `ecdf` must be null or a handle not yet freed.
 */
void cdkw_ecdf_free(struct CdkwEcdf *ecdf);

/**
 * Draws the initial sample of a JSON simulation config and prepares the
 * arrivals. Per-arrival records are not retained.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum CdkwStatus cdkw_simulation_new(const char *config_json, struct CdkwSimulation **out);

/**
 * Processes one arrival. Returns `Finished` once the horizon is reached.
 *
 * # Safety
 * `sim` must be a live handle; `out` must be null or writable.
 */
enum CdkwStatus cdkw_simulation_step(struct CdkwSimulation *sim, struct CdkwArrival *out);

/**
 * Current threshold.
 *
 * # Safety
 * `sim` must be a live handle; `out` must be writable.
 */
enum CdkwStatus cdkw_simulation_theta(const struct CdkwSimulation *sim, double *out);

/**
 * # Safety
 * `sim` must be a live handle; `out` must be writable.
 */
enum CdkwStatus cdkw_simulation_tally(const struct CdkwSimulation *sim, struct CdkwTally *out);

/**
 * Serializes the trace so far as JSON into `buf` (NUL-terminated). `needed`
 * receives the length including the NUL; when `len` is too small nothing
 * is written and `BufferTooSmall` is returned.
 *
 * # Safety
 * `sim` must be a live handle; `buf` must be null or valid for `len` bytes;
 * `needed` must be null or writable.
 */
enum CdkwStatus cdkw_simulation_trace_json(const struct CdkwSimulation *sim,
                                           char *buf,
                                           size_t len,
                                           size_t *needed);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle not yet freed.
 */
void cdkw_simulation_free(struct CdkwSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CENSOR_DKW_H */
