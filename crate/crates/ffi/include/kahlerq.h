#ifndef KAHLERQ_H
#define KAHLERQ_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. `KQ_STATUS_OK` is zero.
typedef enum KqStatus {
  KQ_STATUS_OK = 0,
  KQ_STATUS_NULL_POINTER = 1,
  KQ_STATUS_INVALID_ARGUMENT = 2,
  KQ_STATUS_DIMENSION_MISMATCH = 3,
  KQ_STATUS_STRUCTURE_VIOLATION = 4,
  KQ_STATUS_NOT_HERMITIAN = 5,
  KQ_STATUS_NOT_A_PROJECTOR = 6,
  KQ_STATUS_NOT_NORMALIZED = 7,
  KQ_STATUS_ZERO_PROBABILITY = 8,
  KQ_STATUS_SOLVER_FAILURE = 9,
  KQ_STATUS_BUDGET_EXCEEDED = 10,
  KQ_STATUS_BOUNDARY_SUPPORT = 11,
  // A Rust panic was caught at the boundary.
  KQ_STATUS_INTERNAL = 12,
} KqStatus;

// Opaque complex operator handle.
typedef struct KqOperator KqOperator;

// Opaque state handle.
typedef struct KqState KqState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or an empty string. The
// pointer stays valid until the next kahlerq call on the same thread.
const char *kq_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *kq_version(void);

// Creates a state ψ = q + ip of dimension `n`.
//
// # Safety
// `q` and `p` must point to `n` readable doubles; `out` must be writable.
enum KqStatus kq_state_new(const double *q, const double *p, size_t n, struct KqState **out);

// Releases a state. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void kq_state_free(struct KqState *s);

// Complex dimension of a state, or 0 for null.
//
// # Safety
// `s` must be null or a live state handle.
size_t kq_state_dim(const struct KqState *s);

// Copies the coordinates of a state into `q` and `p`, each of length `n`.
//
// # Safety
// `s` must be a live handle; `q` and `p` must point to `n` writable doubles.
enum KqStatus kq_state_read(const struct KqState *s, double *q, double *p, size_t n);

// Metric g(u, v) = Re⟨u, v⟩.
//
// # Safety
// `u`, `v` must be live handles; `out` must be writable.
enum KqStatus kq_metric_g(const struct KqState *u, const struct KqState *v, double *out);

// Symplectic form ω(u, v) = Im⟨u, v⟩.
//
// # Safety
// `u`, `v` must be live handles; `out` must be writable.
enum KqStatus kq_symplectic_omega(const struct KqState *u, const struct KqState *v, double *out);

// J u = (−p, q), multiplication by i.
//
// # Safety
// `u` must be a live handle; `out` must be writable.
enum KqStatus kq_apply_j(const struct KqState *u, struct KqState **out);

// Creates an `n × n` complex operator X + iY from row-major arrays.
//
// # Safety
// `x` and `y` must point to `n * n` readable doubles; `out` must be writable.
enum KqStatus kq_operator_new(const double *x, const double *y, size_t n, struct KqOperator **out);

// Releases an operator. Null is ignored.
//
// # Safety
// `op` must come from this library and not have been freed.
void kq_operator_free(struct KqOperator *op);

// Complex dimension of an operator, or 0 for null.
//
// # Safety
// `op` must be null or a live operator handle.
size_t kq_operator_dim(const struct KqOperator *op);

// Writes the real `2n × 2n` block form [[X, −Y], [Y, X]] row-major into
// `block`, which holds `len` doubles.
//
// # Safety
// `op` must be a live handle; `block` must point to `len` writable doubles.
enum KqStatus kq_operator_lift(const struct KqOperator *op, double *block, size_t len);

// Recovers X + iY from a real row-major `2n × 2n` block. Fails with
// `KQ_STATUS_STRUCTURE_VIOLATION` when the block does not commute with J.
//
// # Safety
// `block` must point to `4 n²` readable doubles; `out` must be writable.
enum KqStatus kq_operator_lower(const double *block, size_t n, struct KqOperator **out);

// Expectation of an operator: `g_part = g(u, M u)`, `omega_part = ω(u, M u)`.
// For Hermitian operators `omega_part` vanishes.
//
// # Safety
// Handles must be live; `g_part` and `omega_part` must be writable.
enum KqStatus kq_expectation(const struct KqOperator *op,
                             const struct KqState *u,
                             double *g_part,
                             double *omega_part);

// Projective measurement with a projector. Writes the Born probability and
// the collapsed, normalized state. The input state is left untouched.
//
// # Safety
// Handles must be live; `probability` and `post` must be writable.
enum KqStatus kq_measure(const struct KqOperator *projector,
                         const struct KqState *u,
                         double tol,
                         double *probability,
                         struct KqState **post);

// u(t) = exp(−iHt) u0 through the Hermitian eigendecomposition.
//
// # Safety
// Handles must be live; `out` must be writable.
enum KqStatus kq_evolve_exact(const struct KqOperator *h,
                              const struct KqState *u0,
                              double t,
                              struct KqState **out);

// Endpoint of `steps` implicit-midpoint steps of size `t / steps`.
//
// # Safety
// Handles must be live; `out` must be writable.
enum KqStatus kq_evolve_midpoint(const struct KqOperator *h,
                                 const struct KqState *u0,
                                 double t,
                                 size_t steps,
                                 struct KqState **out);

// Product state a ⊗ b, first factor outer.
//
// # Safety
// Handles must be live; `out` must be writable.
enum KqStatus kq_tensor_state(const struct KqState *a,
                              const struct KqState *b,
                              struct KqState **out);

// Product operator a ⊗ b, first factor outer.
//
// # Safety
// Handles must be live; `out` must be writable.
enum KqStatus kq_tensor_operator(const struct KqOperator *a,
                                 const struct KqOperator *b,
                                 struct KqOperator **out);

// Normal-mode frequencies of a Hermitian operator in ascending order,
// written to `lambdas` (length `n`). `degenerate` is set when two
// frequencies coincide.
//
// # Safety
// `h` must be live; `lambdas` must hold `n` doubles; `degenerate` must be writable.
enum KqStatus kq_normal_modes(const struct KqOperator *h,
                              double *lambdas,
                              size_t n,
                              bool *degenerate);

// Searches for a nonzero integer vector k with max |kᵢ| ≤ `bound` and
// |k · λ| < `tol`. `relation` may be null; otherwise it receives k, or zeros
// when the frequencies are independent to that bound. Pass `budget = 0` for
// the default search-space limit.
//
// # Safety
// `lambdas` must hold `n` doubles; `independent` must be writable;
// `relation` must be null or hold `n` writable integers.
enum KqStatus kq_rational_independence(const double *lambdas,
                                       size_t n,
                                       uint32_t bound,
                                       double tol,
                                       uint64_t budget,
                                       bool *independent,
                                       int64_t *relation);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAHLERQ_H */
