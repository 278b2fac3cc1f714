#pragma once

#include "vsp/types.hpp"

#include <optional>

namespace vsp {

/// Conditional posterior moments of x given variances v.
struct PosteriorMoments {
  ComplexVector m;                   // posterior mean, length N
  RealVector phi_diag;               // diagonal of the posterior covariance
  std::optional<ComplexMatrix> phi;  // full covariance, materialized on request
};

/// Positive floor used before evaluating chi / chi_gradient:
/// 1e-12 * max(max_i v_i, 1).
double variance_floor(const RealVector& v);

/// Entrywise max(v, variance_floor(v)).
RealVector apply_variance_floor(const RealVector& v);

/// Posterior mean and covariance diagonal of x | y, v in the dual form
/// Phi = D - D A^H (A D A^H + sigma2 I)^{-1} A D,  m = D A^H (A D A^H + sigma2 I)^{-1} y,
/// which stays well defined when entries of v are exactly zero (those
/// coordinates get m_i = 0, phi_ii = 0). Cost O(M^3 + M^2 N).
PosteriorMoments posterior_moments(const ComplexMatrix& A, const ComplexVector& y,
                                   const RealVector& v, double sigma2,
                                   bool with_full_phi = false);

/// Negative log of the v-dependent part of the evidence:
/// chi(v) = -m^H Phi^{-1} m - ln|Phi| + sum_i ln v_i.
/// Requires v > 0 entrywise; callers floor variances first.
double chi(const ComplexMatrix& A, const ComplexVector& y, const RealVector& v,
           double sigma2);

/// Gradient of chi: d chi / d v_i = -|y^H A u_i|^2 / (sigma^4 v_i^2)
/// - phi_ii / v_i^2 + 1 / v_i with u_i the i-th column of Phi.
/// Requires v > 0 entrywise.
RealVector chi_gradient(const ComplexMatrix& A, const ComplexVector& y,
                        const RealVector& v, double sigma2);

}  // namespace vsp
