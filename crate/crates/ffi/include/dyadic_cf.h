#ifndef DYADIC_CF_H
#define DYADIC_CF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum DcStatus {
  DC_STATUS_OK = 0,
  DC_STATUS_NULL_POINTER = 1,
  DC_STATUS_INVALID_UTF8 = 2,
  DC_STATUS_INVALID_ARGUMENT = 3,
  DC_STATUS_IO = 4,
  DC_STATUS_PARSE = 5,
  /**
   * The identification pipeline failed in one of its stages.
   */
  DC_STATUS_IDENTIFICATION = 6,
  DC_STATUS_BUFFER_TOO_SMALL = 7,
  DC_STATUS_PANIC = 8,
} DcStatus;

/**
 * Which component CF to read from an identification or closed form.
 */
typedef enum DcComponent {
  DC_COMPONENT_ALPHA = 0,
  DC_COMPONENT_ETA = 1,
  DC_COMPONENT_EPSILON = 2,
} DcComponent;

typedef enum DcWindow {
  DC_WINDOW_SHARP = 0,
  DC_WINDOW_COSINE_TAPER = 1,
} DcWindow;

typedef struct DcConfig DcConfig;

typedef struct DcCurve DcCurve;

typedef struct DcDensity DcDensity;

typedef struct DcIdentification DcIdentification;

typedef struct DcSamples DcSamples;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next fallible call on the same thread.
 */
const char *dc_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dc_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void dc_string_free(char *s);

/**
 * Parses a model config from JSON, e.g.
 * `{"c": 0, "alpha": {"kind": "laplace", "scale": 1}, ...}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum DcStatus dc_config_from_json(const char *json, struct DcConfig **out);

/**
 * Builds a config from `kind:scale` strings such as `"uniform_symmetric:1"`.
 *
 * # Safety
 * The three strings must be NUL-terminated; `out` must be writable.
 */
enum DcStatus dc_config_new(double c,
                            const char *alpha,
                            const char *eta,
                            const char *epsilon,
                            struct DcConfig **out);

/**
 * # Safety
 * `cfg` must come from this library and not have been freed.
 */
void dc_config_free(struct DcConfig *cfg);

/**
 * Draws `n` triples with the given seed.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum DcStatus dc_simulate(const struct DcConfig *cfg,
                          size_t n,
                          uint64_t seed,
                          struct DcSamples **out);

/**
 * Reads a samples CSV (and its sidecar when present).
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum DcStatus dc_samples_read_csv(const char *path, struct DcSamples **out);

/**
 * Writes a samples CSV and its sidecar.
 *
 * # Safety
 * `samples` must be a live handle; `path` must be NUL-terminated.
 */
enum DcStatus dc_samples_write_csv(const struct DcSamples *samples, const char *path);

/**
 * Number of triples, or 0 for a null handle.
 *
 * # Safety
 * `samples` must be null or a live handle.
 */
size_t dc_samples_len(const struct DcSamples *samples);

/**
 * Copies the triples row by row into `out` (`3 * len` doubles).
 *
 * # Safety
 * `out` must hold `capacity` doubles.
 */
enum DcStatus dc_samples_copy(const struct DcSamples *samples, double *out, size_t capacity);

/**
 * # Safety
 * `samples` must come from this library and not have been freed.
 */
void dc_samples_free(struct DcSamples *samples);

/**
 * Runs the identification on samples over `|s| <= s_max` with the given
 * grid spacing. `options_json` may be null for the defaults.
 *
 * # Safety
 * `samples` must be a live handle; `options_json` null or NUL-terminated;
 * `out` writable.
 */
enum DcStatus dc_identify_samples(const struct DcSamples *samples,
                                  double s_max,
                                  double spacing,
                                  const char *options_json,
                                  struct DcIdentification **out);

/**
 * Runs the identification on the closed-form slices of `cfg`.
 *
 * # Safety
 * As [`dc_identify_samples`].
 */
enum DcStatus dc_identify_oracle(const struct DcConfig *cfg,
                                 double s_max,
                                 double spacing,
                                 const char *options_json,
                                 struct DcIdentification **out);

/**
 * Copies one identified CF into a new curve handle.
 *
 * # Safety
 * `id` must be a live handle; `out` writable.
 */
enum DcStatus dc_identification_curve(const struct DcIdentification *id,
                                      enum DcComponent which,
                                      struct DcCurve **out);

/**
 * Diagnostics as a JSON string to be released with [`dc_string_free`], or
 * null on failure.
 *
 * # Safety
 * `id` must be null or a live handle.
 */
char *dc_identification_diagnostics_json(const struct DcIdentification *id);

/**
 * # Safety
 * `id` must come from this library and not have been freed.
 */
void dc_identification_free(struct DcIdentification *id);

/**
 * The closed-form CF of one component of `cfg` on a grid.
 *
 * # Safety
 * `cfg` must be a live handle; `out` writable.
 */
enum DcStatus dc_analytic_cf(const struct DcConfig *cfg,
                             enum DcComponent which,
                             double s_max,
                             double spacing,
                             struct DcCurve **out);

/**
 * Number of grid points, or 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t dc_curve_len(const struct DcCurve *curve);

/**
 * Copies frequencies and real/imaginary parts; any of the three output
 * arrays may be null to skip it.
 *
 * # Safety
 * Each non-null array must hold `capacity` doubles.
 */
enum DcStatus dc_curve_copy(const struct DcCurve *curve,
                            double *s,
                            double *re,
                            double *im,
                            size_t capacity);

/**
 * Writes a curve CSV with columns `s,re,im`.
 *
 * # Safety
 * `curve` must be a live handle; `path` NUL-terminated.
 */
enum DcStatus dc_curve_write_csv(const struct DcCurve *curve, const char *path);

/**
 * # Safety
 * `curve` must come from this library and not have been freed.
 */
void dc_curve_free(struct DcCurve *curve);

/**
 * Inverts a CF to a density on the default spatial grid.
 *
 * # Safety
 * `curve` must be a live handle; `out` writable.
 */
enum DcStatus dc_invert_cf(const struct DcCurve *curve,
                           double cutoff,
                           enum DcWindow window,
                           struct DcDensity **out);

/**
 * Number of spatial points, or 0 for a null handle.
 *
 * # Safety
 * `density` must be null or a live handle.
 */
size_t dc_density_len(const struct DcDensity *density);

/**
 * Copies abscissae and density values; either array may be null.
 *
 * # Safety
 * Each non-null array must hold `capacity` doubles.
 */
enum DcStatus dc_density_copy(const struct DcDensity *density,
                              double *x,
                              double *f,
                              size_t capacity);

/**
 * # Safety
 * `density` must come from this library and not have been freed.
 */
void dc_density_free(struct DcDensity *density);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYADIC_CF_H */
