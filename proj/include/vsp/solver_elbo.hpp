#pragma once

#include "vsp/types.hpp"

namespace vsp {

/// Fixed-point iteration on the evidence lower bound: each round computes
/// the posterior moments at the current variances and sets
/// mu_i = |m_i|^2 + phi_ii for all coordinates simultaneously.
/// Exact-zero inputs stay exactly zero.
RealVector elbo_solve(const ComplexMatrix& A, const ComplexVector& y,
                      const RealVector& mu_in, int t_in, double sigma2);

}  // namespace vsp
