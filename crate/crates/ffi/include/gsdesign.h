/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef GSDESIGN_H
#define GSDESIGN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum GsdStatus {
  GSD_STATUS_OK = 0,
  // A required pointer argument was null.
  GSD_STATUS_NULL_POINTER = 1,
  // An input was out of its domain or malformed.
  GSD_STATUS_INVALID_ARGUMENT = 2,
  // A numerical search or integration failed.
  GSD_STATUS_NUMERICAL = 3,
  // The caller's buffer is shorter than the number of stages.
  GSD_STATUS_BUFFER_TOO_SMALL = 4,
  // An internal error was caught at the boundary.
  GSD_STATUS_INTERNAL = 5,
} GsdStatus;

typedef enum GsdFamily {
  GSD_FAMILY_HAYBITTLE_PETO = 0,
  GSD_FAMILY_WANG_TSIATIS = 1,
  GSD_FAMILY_INNER_WEDGE = 2,
  GSD_FAMILY_DOUBLE_TRIANGULAR = 3,
  GSD_FAMILY_POWER_FAMILY = 4,
  GSD_FAMILY_TRIANGULAR = 5,
} GsdFamily;

// Opaque design handle.
typedef struct GsdDesign GsdDesign;

// Trial parameters. `omega` is read only when `has_omega` is true.
typedef struct GsdParams {
  size_t stages;
  double delta;
  double alpha;
  double beta;
  double sigma0;
  double sigma1;
  double ratio;
  double omega;
  bool has_omega;
} GsdParams;

// Expected sample size characteristics of a design.
typedef struct GsdSummary {
  double p_reject_null;
  double ess_null;
  double p_reject_alt;
  double ess_alt;
  double max_ess;
  double argmax_tau;
  double max_n;
} GsdSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null if the last
// call succeeded. Valid until the next library call on the same thread.
const char *gsd_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *gsd_version(void);

// Fills `out` with the default parameters (L = 3, delta 0.2, alpha 0.05,
// beta 0.2, unit variances, equal allocation, no omega).
//
// # Safety
// `out` must be null or valid for writes.
enum GsdStatus gsd_params_default(struct GsdParams *out);

// Builds a design of `family`, one of the `GsdFamily` values. On success
// `*out` owns a new handle.
//
// # Safety
// `params` must be null or point to a valid `GsdParams`; `out` must be null
// or valid for writes.
enum GsdStatus gsd_design_create(uint32_t family,
                                 const struct GsdParams *params,
                                 struct GsdDesign **out);

// Releases a design handle. Null is ignored.
//
// # Safety
// `design` must be null or a handle from this library not yet freed.
void gsd_design_free(struct GsdDesign *design);

// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_family(const struct GsdDesign *design, enum GsdFamily *out);

// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_stages(const struct GsdDesign *design, size_t *out);

// Real-valued per-stage group size in arm 0 and arm 1.
//
// # Safety
// `design` must be a live handle or null; outputs null or writable.
enum GsdStatus gsd_design_group_size(const struct GsdDesign *design, double *arm0, double *arm1);

// Maximum possible total sample size.
//
// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_max_n(const struct GsdDesign *design, double *out);

// Type-I error rate and power attained by the design.
//
// # Safety
// `design` must be a live handle or null; outputs null or writable.
enum GsdStatus gsd_design_attained(const struct GsdDesign *design, double *alpha, double *power);

// Copies the lower (acceptance or futility) and upper (rejection or
// efficacy) boundaries into buffers of at least `len` values.
//
// # Safety
// `design` must be a live handle or null; buffers null or writable for `len` values.
enum GsdStatus gsd_design_boundaries(const struct GsdDesign *design,
                                     double *lower,
                                     double *upper,
                                     size_t len);

// Copies the information levels into a buffer of at least `len` values.
//
// # Safety
// `design` must be a live handle or null; `out` null or writable for `len` values.
enum GsdStatus gsd_design_information(const struct GsdDesign *design, double *out, size_t len);

// P(reject H0) at effect `tau`.
//
// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_rejection_probability(const struct GsdDesign *design,
                                                double tau,
                                                double *out);

// E(N) at effect `tau`.
//
// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_expected_sample_size(const struct GsdDesign *design,
                                               double tau,
                                               double *out);

// Error rates and expected sample sizes, including the maximum over tau.
//
// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_summary(const struct GsdDesign *design, struct GsdSummary *out);

// Serialises the design as a JSON design document. Free `*out` with
// [`gsd_string_free`].
//
// # Safety
// `design` must be a live handle or null; `out` null or writable.
enum GsdStatus gsd_design_to_json(const struct GsdDesign *design, char **out);

// Rebuilds a design from a JSON design document.
//
// # Safety
// `json` must be null or a NUL-terminated string; `out` null or writable.
enum GsdStatus gsd_design_from_json(const char *json, struct GsdDesign **out);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void gsd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSDESIGN_H */
