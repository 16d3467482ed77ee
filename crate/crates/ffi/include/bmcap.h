#ifndef BMCAP_H
#define BMCAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum BmcapStatus {
  BMCAP_STATUS_OK = 0,
  BMCAP_STATUS_NULL_POINTER = 1,
  BMCAP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The energy constraint `theta <= 1` is violated.
   */
  BMCAP_STATUS_CONSTRAINT_VIOLATION = 3,
  /**
   * Non-convergence or another numerical failure.
   */
  BMCAP_STATUS_NUMERICAL = 4,
  /**
   * Internal panic; the library state is unaffected.
   */
  BMCAP_STATUS_PANIC = 5,
} BmcapStatus;

/**
 * Values accepted for the `kind` argument.
 */
typedef enum BmcapRateKind {
  BMCAP_RATE_KIND_HOLEVO = 0,
  BMCAP_RATE_KIND_HETERODYNE = 1,
  BMCAP_RATE_KIND_HOMODYNE = 2,
} BmcapRateKind;

/**
 * Opaque channel handle.
 */
typedef struct BmcapChannel BmcapChannel;

/**
 * Maximum of a rate over `(r, y)`.
 */
typedef struct BmcapOptimum {
  double r;
  double y;
  /**
   * Bits per mode.
   */
  double value;
  uint64_t evaluations;
  bool converged;
} BmcapOptimum;

/**
 * Energy-allowed interval of `r`; infinite bounds when unconstrained.
 */
typedef struct BmcapBounds {
  double min;
  double max;
} BmcapBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a channel with transmittivity `eta`, photon number `photons`
 * and memory strength `s`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum BmcapStatus bmcap_channel_new(double eta, double photons, double s, struct BmcapChannel **out);

/**
 * Releases a channel. Null is ignored.
 *
 * # Safety
 * `channel` must be null or a handle from [`bmcap_channel_new`] not yet freed.
 */
void bmcap_channel_free(struct BmcapChannel *channel);

/**
 * Changes the memory strength of an existing channel.
 *
 * # Safety
 * `channel` must be null or a live handle.
 */
enum BmcapStatus bmcap_channel_set_memory(struct BmcapChannel *channel, double s);

/**
 * Sets the absolute and relative tolerance of the asymptotic integrals.
 *
 * # Safety
 * `channel` must be null or a live handle.
 */
enum BmcapStatus bmcap_channel_set_quad_tol(struct BmcapChannel *channel, double tol);

/**
 * Rate of `kind` in bits per mode at `(r, y)` for `n` uses, or in the
 * `n -> infinity` limit when `n == 0`. Homodyne uses the single-quadrature
 * modulation, the others the symmetric one.
 *
 * # Safety
 * `channel` must be null or a live handle; `out` null or writable.
 */
enum BmcapStatus bmcap_rate(const struct BmcapChannel *channel,
                            uint32_t kind,
                            size_t n,
                            double r,
                            double y,
                            double *out);

/**
 * Maximum of the rate of `kind` over `(r, y)`; `n == 0` for the limit.
 *
 * # Safety
 * `channel` must be null or a live handle; `out` null or writable.
 */
enum BmcapStatus bmcap_maximize(const struct BmcapChannel *channel,
                                uint32_t kind,
                                size_t n,
                                struct BmcapOptimum *out);

/**
 * Energy-allowed interval of `r` for `n` uses (`n == 0`: the limit).
 *
 * # Safety
 * `out` must be null or writable.
 */
enum BmcapStatus bmcap_r_bounds(size_t n, double photons, struct BmcapBounds *out);

/**
 * `g(x) = (x + 1) log2(x + 1) - x log2 x`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum BmcapStatus bmcap_entropy_g(double x, double *out);

/**
 * Modified Bessel function `I0(x)`.
 *
 * # Safety
 * `out` must be null or writable.
 */
enum BmcapStatus bmcap_bessel_i0(double x, double *out);

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *bmcap_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bmcap_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BMCAP_H */
