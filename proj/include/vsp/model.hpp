#pragma once

#include "vsp/types.hpp"

#include <random>

namespace vsp {

using Rng = std::mt19937_64;

/// Gamma(v; a, b) density with rate parameterization. Zero for v <= 0.
/// Evaluated in log space so extreme shapes (a down to 1e-10) stay finite.
double gamma_pdf(double v, const GammaParams& p);

/// Draws n i.i.d. variances from the spike-and-Gamma marginal:
/// Gamma(a, b) with probability rho, exact zero otherwise.
RealVector sample_block_prior(Index n, const GammaParams& p, double rho, Rng& rng);

/// ln CN(y; 0, cov) for Hermitian positive definite cov:
/// -y^H cov^{-1} y - ln det(pi * cov), via Cholesky.
double cscg_loglik(const ComplexVector& y, const ComplexMatrix& cov);

/// One draw from the unit-variance circularly symmetric complex Gaussian.
Complex sample_scg(Rng& rng);

}  // namespace vsp
