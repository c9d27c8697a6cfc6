#ifndef HENONLAB_H
#define HENONLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Orbit type codes used in [`HlOrbitInfo::kind`].
 */
#define HL_ORBIT_ATTRACTING 0

#define HL_ORBIT_SADDLE 1

#define HL_ORBIT_SEMI_PARABOLIC 2

#define HL_ORBIT_SEMI_NEUTRAL 3

/**
 * Status codes returned by every fallible function.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_INVALID_MAP = 3,
  HL_STATUS_NOT_INVERTIBLE = 4,
  HL_STATUS_NO_CONVERGENCE = 5,
  HL_STATUS_ORBIT_ESCAPED = 6,
  HL_STATUS_PARSE = 7,
  HL_STATUS_IO = 8,
  HL_STATUS_CERTIFICATE = 9,
  HL_STATUS_PANIC = 10,
  HL_STATUS_INTERNAL = 11,
} HlStatus;

/**
 * Opaque splitting or hyperbolicity certificate.
 */
typedef struct HlCertificate HlCertificate;

/**
 * Opaque map handle.
 */
typedef struct HlMap HlMap;

/**
 * Opaque list of periodic orbits.
 */
typedef struct HlOrbits HlOrbits;

/**
 * A point (x, y) of C² as four doubles.
 */
typedef struct HlPoint {
  double x_re;
  double x_im;
  double y_re;
  double y_im;
} HlPoint;

typedef struct HlOrbitInfo {
  size_t period;
  int32_t kind;
  double lambda1_re;
  double lambda1_im;
  double lambda2_re;
  double lambda2_im;
} HlOrbitInfo;

typedef struct HlCertificateSummary {
  size_t boxes;
  size_t verified;
  /**
   * Chain length N; 0 when no box verified.
   */
  size_t n;
  double c;
  /**
   * Certified expansion rate, NaN for splitting-only certificates.
   */
  double lambda_u;
} HlCertificateSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *hl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed.
 */
void hl_string_free(char *s);

/**
 * Builds (p(x) − b·y, x) from `len` coefficients in ascending degree.
 *
 * # Safety
 * `re` and `im` must point to `len` doubles; `out` must be writable.
 */
enum HlStatus hl_map_new(const double *re,
                         const double *im,
                         size_t len,
                         double b_re,
                         double b_im,
                         struct HlMap **out);

/**
 * Parses a map file body (JSON schema `{"p": [...], "b": ..., "compose": [...]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_map_from_json(const char *json, struct HlMap **out);

/**
 * # Safety
 * `map` must be null or a handle from this library that has not been freed.
 */
void hl_map_free(struct HlMap *map);

/**
 * Topological degree d of the map.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_map_degree(const struct HlMap *map, size_t *out);

/**
 * # Safety
 * `map` must be a live handle; `z` must be readable and `out` writable.
 */
enum HlStatus hl_map_apply(const struct HlMap *map, const struct HlPoint *z, struct HlPoint *out);

/**
 * # Safety
 * `map` must be a live handle; `z` must be readable and `out` writable.
 */
enum HlStatus hl_map_apply_inverse(const struct HlMap *map,
                                   const struct HlPoint *z,
                                   struct HlPoint *out);

/**
 * Verified filtration radius R.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_map_filtration_radius(const struct HlMap *map, double *out);

/**
 * Green function G⁺ (`backward` = 0) or G⁻ (`backward` ≠ 0) at z.
 *
 * # Safety
 * `map` must be a live handle; `z` must be readable and `out` writable.
 */
enum HlStatus hl_green(const struct HlMap *map,
                       const struct HlPoint *z,
                       int32_t backward,
                       double *out);

/**
 * Periodic orbits of exact period `period` from `seeds` Newton seeds.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_periodic_orbits(const struct HlMap *map,
                                 size_t period,
                                 size_t seeds,
                                 uint64_t seed,
                                 struct HlOrbits **out);

/**
 * # Safety
 * `orbits` must be a live handle.
 */
size_t hl_orbits_len(const struct HlOrbits *orbits);

/**
 * Period, type and multipliers of orbit `i`.
 *
 * # Safety
 * `orbits` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_orbits_info(const struct HlOrbits *orbits, size_t i, struct HlOrbitInfo *out);

/**
 * Point `k` of orbit `i`.
 *
 * # Safety
 * `orbits` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_orbits_point(const struct HlOrbits *orbits,
                              size_t i,
                              size_t k,
                              struct HlPoint *out);

/**
 * # Safety
 * `orbits` must be null or a live handle.
 */
void hl_orbits_free(struct HlOrbits *orbits);

/**
 * Dominated-splitting certificate on the level-`depth` cover with cone
 * aperture `alpha`.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_verify_splitting(const struct HlMap *map,
                                  size_t depth,
                                  double alpha,
                                  struct HlCertificate **out);

/**
 * Hyperbolicity certificate with expansion rate `lambda_u` > 1.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_verify_hyperbolicity(const struct HlMap *map,
                                      size_t depth,
                                      double alpha,
                                      double lambda_u,
                                      struct HlCertificate **out);

/**
 * # Safety
 * `cert` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_certificate_summary(const struct HlCertificate *cert,
                                     struct HlCertificateSummary *out);

/**
 * Certificate as JSON; release with [`hl_string_free`].
 *
 * # Safety
 * `cert` must be a live handle; `out` must be writable.
 */
enum HlStatus hl_certificate_to_json(const struct HlCertificate *cert, char **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HlStatus hl_certificate_from_json(const char *json, struct HlCertificate **out);

/**
 * Re-verifies every Verified box; writes the number of boxes that did not
 * re-verify to `mismatches` (0 means the certificate stands).
 *
 * # Safety
 * `cert` must be a live handle; `mismatches` must be writable.
 */
enum HlStatus hl_certificate_recheck(const struct HlCertificate *cert, size_t *mismatches);

/**
 * # Safety
 * `cert` must be null or a live handle.
 */
void hl_certificate_free(struct HlCertificate *cert);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HENONLAB_H */
