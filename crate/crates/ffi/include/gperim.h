#ifndef GPERIM_H
#define GPERIM_H

/* Generated by cbindgen from gperim-ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum GpStatus {
  GP_STATUS_OK = 0,
  GP_STATUS_NULL_POINTER = 1,
  GP_STATUS_DOMAIN = 2,
  GP_STATUS_INVALID_GRID = 3,
  GP_STATUS_SHAPE_MISMATCH = 4,
  GP_STATUS_NOT_INDICATOR = 5,
  GP_STATUS_INVALID_ARGUMENT = 6,
  GP_STATUS_PARSE = 7,
  GP_STATUS_IO = 8,
  GP_STATUS_INFEASIBLE = 9,
  GP_STATUS_PANIC = 10,
} GpStatus;

// Opaque scalar field handle. Holds a reference to its grid, so it stays
// valid after the grid handle it was built from is freed.
typedef struct GpField GpField;

// Opaque grid handle.
typedef struct GpGrid GpGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null if none occurred.
// The pointer stays valid until the next failing call on the same thread.
const char *gp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *gp_version(void);

// Standard normal CDF.
double gp_normal_cdf(double x);

// Standard normal quantile; `p` must lie in `(0, 1)`.
//
// # Safety
// `out` must be null or valid for a write.
enum GpStatus gp_normal_quantile(double p, double *out);

// Gaussian isoperimetric profile at `p` in `[0, 1]`.
//
// # Safety
// `out` must be null or valid for a write.
enum GpStatus gp_isoperimetric_profile(double p, double *out);

// Build a grid with `points_per_axis` nodes per axis on `[-half_width, half_width]^dim`.
//
// # Safety
// `out` must be null or valid for a write.
enum GpStatus gp_grid_new(size_t dim,
                          double half_width,
                          size_t points_per_axis,
                          struct GpGrid **out);

// Release a grid. Null is ignored.
//
// # Safety
// `grid` must be null or a handle from [`gp_grid_new`] not yet freed.
void gp_grid_free(struct GpGrid *grid);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `grid` must be null or a live handle.
size_t gp_grid_len(const struct GpGrid *grid);

// Dimension, or 0 for a null handle.
//
// # Safety
// `grid` must be null or a live handle.
size_t gp_grid_dim(const struct GpGrid *grid);

// Copy `len` node values (row-major) into a new field on `grid`.
//
// # Safety
// `values` must be valid for `len` reads; `grid` and `out` as above.
enum GpStatus gp_field_from_values(const struct GpGrid *grid,
                                   const double *values,
                                   size_t len,
                                   struct GpField **out);

// Release a field. Null is ignored.
//
// # Safety
// `field` must be null or a handle produced by this library not yet freed.
void gp_field_free(struct GpField *field);

// Number of values, or 0 for a null handle.
//
// # Safety
// `field` must be null or a live handle.
size_t gp_field_len(const struct GpField *field);

// Copy the field values into `dst`, which must hold exactly the field length.
//
// # Safety
// `dst` must be valid for `len` writes.
enum GpStatus gp_field_values(const struct GpField *field, double *dst, size_t len);

// Indicator of `{x : <h, x> < c}` on `grid`; `h` has `h_len == dim` entries.
//
// # Safety
// `h` must be valid for `h_len` reads.
enum GpStatus gp_half_space_indicator(const struct GpGrid *grid,
                                      const double *h,
                                      size_t h_len,
                                      double c,
                                      struct GpField **out);

// Gaussian integral of the field.
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_volume(const struct GpField *field, double *out);

// Gaussian total variation.
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_total_variation(const struct GpField *field, double *out);

// Gaussian perimeter of a set indicator.
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_perimeter(const struct GpField *field, double *out);

// Relaxed perimeter energy of a `[0, 1]`-valued field.
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_relaxed_energy(const struct GpField *field, double *out);

// Allen-Cahn energy at width `eps` with the quartic double well.
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_allen_cahn_energy(const struct GpField *field, double eps, double *out);

// Surface tension constant of the quartic double well.
//
// # Safety
// `out` must be null or writable.
enum GpStatus gp_well_constant(double *out);

// Ehrhard symmetral of a set indicator, keeping the first `k` variables.
//
// # Safety
// `set` null or live; `out` null or writable.
enum GpStatus gp_symmetrize_set(const struct GpField *set, size_t k, struct GpField **out);

// Ehrhard symmetral of a `[0, 1]`-valued function through `n_levels` level sets.
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_symmetrize_function(const struct GpField *field,
                                     size_t k,
                                     size_t n_levels,
                                     struct GpField **out);

// Serialize a field to the text dump format. Free the result with
// [`gp_string_free`].
//
// # Safety
// `field` null or live; `out` null or writable.
enum GpStatus gp_field_dump(const struct GpField *field, char **out);

// Parse a field from the text dump format.
//
// # Safety
// `text` must be null or a NUL-terminated string.
enum GpStatus gp_field_parse(const char *text, struct GpField **out);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from [`gp_field_dump`] not yet freed.
void gp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GPERIM_H */
