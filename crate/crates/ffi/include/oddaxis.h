#ifndef ODDAXIS_H
#define ODDAXIS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by every function.
typedef enum OddaxisStatus {
  ODDAXIS_STATUS_OK = 0,
  ODDAXIS_STATUS_NULL_POINTER = 1,
  ODDAXIS_STATUS_INVALID_INPUT = 2,
  ODDAXIS_STATUS_DIMENSION_MISMATCH = 3,
  ODDAXIS_STATUS_SEARCH_FAILURE = 4,
  ODDAXIS_STATUS_NON_CONVERGENT_DEGREE = 5,
  ODDAXIS_STATUS_DEGENERATE_MAP = 6,
  ODDAXIS_STATUS_PANIC = 7,
} OddaxisStatus;

// Icosphere mesh handle.
typedef struct OddaxisMesh OddaxisMesh;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Length in bytes of the last error message on this thread, excluding the
// terminating NUL. Zero after a successful call.
size_t oddaxis_last_error_length(void);

// Copies the last error message into `buf` as a NUL-terminated string,
// truncating to `len - 1` bytes. Returns the number of bytes written
// before the NUL.
//
// # Safety
// `buf` must point to `len` writable bytes.
size_t oddaxis_last_error_message(char *buf, size_t len);

// Builds an icosphere of the given subdivision level (0 to 8).
//
// # Safety
// `out_mesh` must be a valid pointer; on success it receives a handle that
// must be released with [`oddaxis_mesh_free`].
enum OddaxisStatus oddaxis_mesh_new(uint32_t level, struct OddaxisMesh **out_mesh);

// Releases a mesh. Null is ignored.
//
// # Safety
// `mesh` must come from [`oddaxis_mesh_new`] and not be used afterwards.
void oddaxis_mesh_free(struct OddaxisMesh *mesh);

// Number of mesh vertices, or 0 for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
size_t oddaxis_mesh_vertex_count(const struct OddaxisMesh *mesh);

// Copies vertex coordinates as `x, y, z` triples into `out_xyz` (length
// `3 * vertex_count`).
//
// # Safety
// `mesh` must be a live handle and `out_xyz` must hold `len` doubles.
enum OddaxisStatus oddaxis_mesh_vertices(const struct OddaxisMesh *mesh,
                                         double *out_xyz,
                                         size_t len);

// Brouwer degree of a builtin map named by `spec` (for example
// `"suspension:k=3"`), integrated over `mesh`.
//
// # Safety
// `mesh` must be a live handle, `spec` a NUL-terminated string, and the
// outputs valid pointers.
enum OddaxisStatus oddaxis_surface_degree(const struct OddaxisMesh *mesh,
                                          const char *spec,
                                          int64_t *out_degree,
                                          double *out_residual);

// Brouwer degree of a map given by its values at the vertices of `mesh`
// (`3 * vertex_count` doubles, in vertex order).
//
// # Safety
// `values` must hold `len` doubles; the other pointers must be valid.
enum OddaxisStatus oddaxis_surface_degree_sampled(const struct OddaxisMesh *mesh,
                                                  const double *values,
                                                  size_t len,
                                                  int64_t *out_degree,
                                                  double *out_residual);

// Winding number of a closed S¹ curve sampled at `m` equispaced angles
// (`2 * m` doubles, `x, y` pairs).
//
// # Safety
// `values` must hold `2 * m` doubles and `out_winding` must be valid.
enum OddaxisStatus oddaxis_winding_number(const double *values, size_t m, int64_t *out_winding);

// Coefficients of `(1 + a)^k` in `Z2[a]/(a^(n+1))`, written as 0/1 bytes
// to `out_bits[0..=n]`.
//
// # Safety
// `out_bits` must hold `n + 1` bytes.
enum OddaxisStatus oddaxis_sw_class(uint64_t k, size_t n, uint8_t *out_bits);

// Radon–Hurwitz number of `n >= 1`.
//
// # Safety
// `out_rho` must be a valid pointer.
enum OddaxisStatus oddaxis_radon_hurwitz(uint64_t n, uint64_t *out_rho);

// Unit `(s1, s2, s3)` minimizing the smallest singular value of
// `s1 A1 + s2 A2 + s3 A3` for row-major `q x q` matrices.
//
// # Safety
// Each matrix must hold `q * q` doubles; `out_point` must hold 3.
enum OddaxisStatus oddaxis_singular_combination(const struct OddaxisMesh *mesh,
                                                size_t q,
                                                const double *a1,
                                                const double *a2,
                                                const double *a3,
                                                double *out_point,
                                                double *out_sigma_min);

// Eigenpair of an odd-size complex matrix given as separate row-major real
// and imaginary parts. The eigenvector is unit length with its largest
// entry real and positive.
//
// # Safety
// `re` and `im` must hold `n * n` doubles, `vec_re` and `vec_im` `n`, and
// `out_eigenvalue` 2 (real and imaginary part); `out_residual` must be valid.
enum OddaxisStatus oddaxis_complex_odd_eigen(const struct OddaxisMesh *mesh,
                                             size_t n,
                                             const double *re,
                                             const double *im,
                                             double *out_eigenvalue,
                                             double *vec_re,
                                             double *vec_im,
                                             double *out_residual);

// Real eigenpair of an odd-size real matrix (row-major). `seed` fixes the
// random starts of the search.
//
// # Safety
// `t` must hold `n * n` doubles and `out_vector` `n`; the scalar outputs
// must be valid.
enum OddaxisStatus oddaxis_real_odd_axis(size_t n,
                                         const double *t,
                                         uint64_t seed,
                                         double *out_eigenvalue,
                                         double *out_vector,
                                         double *out_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ODDAXIS_H */
