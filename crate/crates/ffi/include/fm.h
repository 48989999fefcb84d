#ifndef FM_H
#define FM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes shared by every function in this library.
typedef enum FmStatus {
  FM_STATUS_OK = 0,
  FM_STATUS_NULL_POINTER = 1,
  FM_STATUS_DOMAIN = 2,
  FM_STATUS_INVALID_PARAMETER = 3,
  FM_STATUS_UNSUPPORTED = 4,
  FM_STATUS_DEGENERATE = 5,
  FM_STATUS_POLE = 6,
  FM_STATUS_ARGUMENT = 7,
  FM_STATUS_NUMERICAL = 8,
  FM_STATUS_PANIC = 9,
  FM_STATUS_BUFFER_TOO_SMALL = 10,
} FmStatus;

// Metric family selector for [`fm_volume_factor`].
typedef enum FmFamily {
  FM_FAMILY_MATSUMOTO = 0,
  FM_FAMILY_RANDERS = 1,
  FM_FAMILY_EUCLIDEAN = 2,
} FmFamily;

// Opaque solver result.
typedef struct FmGridSolution FmGridSolution;

// Opaque exact K(p), L(p) pair for one value of b².
typedef struct FmKlPolys FmKlPolys;

// First and second derivatives of a graph z = f(x, y) at one point.
typedef struct FmGraphPoint {
  double f1;
  double f2;
  double h11;
  double h12;
  double h22;
} FmGraphPoint;

// Copies the last error message on this thread into `buf` as a
// NUL-terminated string, truncating if needed. Returns the full message
// length in bytes, excluding the terminator.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t fm_last_error(char *buf, size_t len);

// Busemann–Hausdorff volume factor of an n-dimensional subspace, by
// adaptive quadrature.
//
// # Safety
// `out` must be valid for writes.
enum FmStatus fm_volume_factor(double b, enum FmFamily family, size_t n, double *out);

// Minimal-graph residual over the plane z = 0.
//
// # Safety
// `point` must be readable and `out` writable.
enum FmStatus fm_graph_residual(double b, const struct FmGraphPoint *point, double *out);

// Minimal-graph residual over the plane with unit normal `k` (three
// doubles); a null `k` means (0, 0, 1).
//
// # Safety
// `point` must be readable, `k` null or readable for three doubles, and
// `out` writable.
enum FmStatus fm_tilted_graph_residual(double b,
                                       const struct FmGraphPoint *point,
                                       const double *k,
                                       double *out);

// λ f″ + μ g″ for the translation surface f(x) + g(y).
//
// # Safety
// `out` must be valid for writes.
enum FmStatus fm_translation_residual(double b,
                                      double fp,
                                      double fpp,
                                      double gp,
                                      double gpp,
                                      double *out);

// Solves the minimal-graph Dirichlet problem on [x0,x1]×[y0,y1] with
// `nodes` points per side, boundary included.
//
// `values` holds `nodes * nodes` doubles in row-major order (x fastest);
// only boundary entries are read. On success `*out` owns a new handle.
//
// # Safety
// `values` must be readable for `len` doubles and `out` writable.
enum FmStatus fm_solve(double b,
                       double x0,
                       double x1,
                       double y0,
                       double y1,
                       size_t nodes,
                       const double *values,
                       size_t len,
                       double tol,
                       size_t max_iter,
                       struct FmGridSolution **out);

// Number of nodal values in a solution.
//
// # Safety
// `sol` must be a live handle or null.
size_t fm_grid_solution_len(const struct FmGridSolution *sol);

// Copies the nodal values into `buf`.
//
// # Safety
// `sol` must be a live handle and `buf` writable for `len` doubles.
enum FmStatus fm_grid_solution_values(const struct FmGridSolution *sol, double *buf, size_t len);

// Newton iterations used, final residual norm and planarity deviation.
//
// # Safety
// `sol` must be a live handle; each out pointer may be null.
enum FmStatus fm_grid_solution_stats(const struct FmGridSolution *sol,
                                     size_t *iterations,
                                     double *residual_norm,
                                     double *planarity);

// Releases a solution handle. Null is ignored.
//
// # Safety
// `sol` must come from [`fm_solve`] and not be used afterwards.
void fm_grid_solution_free(struct FmGridSolution *sol);

// Exact K and L for b² = num/den.
//
// # Safety
// `out` must be writable.
enum FmStatus fm_kl_polys_new(int64_t b2_num, int64_t b2_den, struct FmKlPolys **out);

// Same as [`fm_kl_polys_new`] with b² given as text ("1/100", "0.09").
//
// # Safety
// `b2` must be a NUL-terminated string and `out` writable.
enum FmStatus fm_kl_polys_parse(const char *b2, struct FmKlPolys **out);

// K(p) and L(p) in double precision.
//
// # Safety
// `kl` must be a live handle; `k` and `l` may be null.
enum FmStatus fm_kl_polys_eval(const struct FmKlPolys *kl, double p, double *k, double *l);

// Exact (K/L)′ at p = num/den, reported as a double plus a flag telling
// whether it equals ±1 exactly.
//
// # Safety
// `kl` must be a live handle; `value` and `is_unit` may be null.
enum FmStatus fm_kl_ratio_derivative(const struct FmKlPolys *kl,
                                     int64_t p_num,
                                     int64_t p_den,
                                     double *value,
                                     bool *is_unit);

// Whether both compatibility identities hold for this b².
//
// # Safety
// `kl` must be a live handle and `out` writable.
enum FmStatus fm_kl_compatible(const struct FmKlPolys *kl, bool *out);

// Releases a K/L handle. Null is ignored.
//
// # Safety
// `kl` must come from [`fm_kl_polys_new`] or [`fm_kl_polys_parse`] and not
// be used afterwards.
void fm_kl_polys_free(struct FmKlPolys *kl);

#endif  /* FM_H */
