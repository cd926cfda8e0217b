#ifndef CCPB_H
#define CCPB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CcpbStatus {
  CCPB_STATUS_OK = 0,
  CCPB_STATUS_INVALID_ARGUMENT = 1,
  CCPB_STATUS_DOMAIN = 2,
  CCPB_STATUS_QUADRATURE_NON_CONVERGENCE = 3,
  CCPB_STATUS_BRACKETING = 4,
  CCPB_STATUS_NON_CONVERGENCE = 5,
  CCPB_STATUS_GEOMETRY = 6,
  CCPB_STATUS_NULL_POINTER = 7,
  CCPB_STATUS_PANIC = 8,
} CcpbStatus;

typedef enum CcpbRegime {
  CCPB_REGIME_CONFINED = 0,
  CCPB_REGIME_INTERMEDIATE = 1,
  CCPB_REGIME_EFFECTIVELY_INFINITE = 2,
} CcpbRegime;

// Opaque solution handle.
typedef struct CcpbSolution CcpbSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the
// same thread.
const char *ccpb_last_error_message(void);

// Solves for the steady state on `[-L/2, L/2]` with boundary potentials
// `±V` and Stern width `delta` (0 for Dirichlet boundaries).
//
// # Safety
// `out` must be valid for writing one pointer.
enum CcpbStatus ccpb_solve(double length,
                           double voltage,
                           double delta,
                           double tol,
                           struct CcpbSolution **out);

// Releases a handle; null is ignored.
//
// # Safety
// `sol` must be null or a handle from `ccpb_solve` not yet freed.
void ccpb_solution_free(struct CcpbSolution *sol);

// ε; may underflow to 0 for very large domains.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_eps(const struct CcpbSolution *sol, double *out);

// ln ε, finite whenever V ≠ 0.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_ln_eps(const struct CcpbSolution *sol, double *out);

// Bulk concentration factor α.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_alpha(const struct CcpbSolution *sol, double *out);

// Field at the domain center, signed like V.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_phi_x0(const struct CcpbSolution *sol, double *out);

// Potential at `x = L/2` (below V with a Stern layer).
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_phi_boundary(const struct CcpbSolution *sol, double *out);

// Residual of the boundary condition solve.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_residual(const struct CcpbSolution *sol, double *out);

// Number of `(phi, x)` table entries on `0 ≤ x ≤ L/2`; 0 for a null handle.
//
// # Safety
// `sol` must be null or a live handle.
size_t ccpb_solution_sample_count(const struct CcpbSolution *sol);

// # Safety
// `sol` must be a live handle; `phi` and `x` valid for writes.
enum CcpbStatus ccpb_solution_sample(const struct CcpbSolution *sol,
                                     size_t index,
                                     double *phi,
                                     double *x);

// φ(x) for `|x| ≤ L/2`.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_phi_of_x(const struct CcpbSolution *sol, double x, double *out);

// x(φ) for `|φ| ≤ |φ(L/2)|`.
//
// # Safety
// `sol` must be a live handle and `out` valid for writes.
enum CcpbStatus ccpb_solution_x_of_phi(const struct CcpbSolution *sol, double phi, double *out);

// `∫₀^φ dx / √(sinh²(x/2) + ε²)` to absolute tolerance `tol`; ε is passed as ln ε.
//
// # Safety
// `out` must be valid for writes.
enum CcpbStatus ccpb_i_exact(double phi, double ln_eps, double tol, double *out);

// Asymptotic approximation of the integral; `refined` selects the √ε
// matching point instead of ε^{3/4}. `within_validity` may be null.
//
// # Safety
// `out` must be valid for writes; `within_validity` null or valid.
enum CcpbStatus ccpb_i_approx(double phi,
                              double ln_eps,
                              bool refined,
                              double *out,
                              bool *within_validity);

// # Safety
// `out` must be valid for writes.
enum CcpbStatus ccpb_predicted_error(double voltage, double length, double *out);

// Regime label with the predicted error and `4 sinh²(V/4)/L`; the two
// value pointers may be null.
//
// # Safety
// `label` must be valid for writes; the others null or valid.
enum CcpbStatus ccpb_classify_regime(double voltage,
                                     double length,
                                     double tol,
                                     enum CcpbRegime *label,
                                     double *e_value,
                                     double *ratio_value);

// # Safety
// `out` must be valid for writes.
enum CcpbStatus ccpb_channel_bath_ratio(double r, double max_error, double *out);

// # Safety
// `cosh_form` and `paper_numeric_form` must be valid for writes.
enum CcpbStatus ccpb_electrode_bulk_ratio(double phi_el,
                                          double delta_err,
                                          double porosity,
                                          double *cosh_form,
                                          double *paper_numeric_form);

// Debye length in meters for a concentration in mol/L.
//
// # Safety
// `out` must be valid for writes.
enum CcpbStatus ccpb_debye_length(double concentration,
                                  double temperature,
                                  double relative_permittivity,
                                  double *out);

// # Safety
// `out` must be valid for writes.
enum CcpbStatus ccpb_nondim_voltage(double voltage, double temperature, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCPB_H */
