#include "vsp/model.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>

namespace vsp {

double gamma_pdf(double v, const GammaParams& p) {
  require(p.valid(), "gamma_pdf: invalid GammaParams");
  if (!(v > 0.0)) return 0.0;
  const double log_pdf =
      p.a * std::log(p.b) + (p.a - 1.0) * std::log(v) - p.b * v - std::lgamma(p.a);
  return std::exp(log_pdf);
}

RealVector sample_block_prior(Index n, const GammaParams& p, double rho, Rng& rng) {
  require(n >= 1, "sample_block_prior: n must be >= 1");
  require(p.valid(), "sample_block_prior: invalid GammaParams");
  require(rho >= 0.0 && rho <= 1.0, "sample_block_prior: rho must lie in [0,1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::gamma_distribution<double> gamma(p.a, 1.0 / p.b);  // shape, scale
  RealVector out(n);
  for (Index i = 0; i < n; ++i) {
    out[i] = unif(rng) < rho ? gamma(rng) : 0.0;
  }
  return out;
}

double cscg_loglik(const ComplexVector& y, const ComplexMatrix& cov) {
  const Index m = y.size();
  require(cov.rows() == m && cov.cols() == m, "cscg_loglik: dimension mismatch");
  require(y.allFinite() && cov.allFinite(), "cscg_loglik: non-finite input");

  Eigen::LLT<ComplexMatrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("cscg_loglik: covariance is not positive definite");
  }
  // ln det(Sigma) = 2 sum ln L_ii; y^H Sigma^{-1} y = ||L^{-1} y||^2.
  const auto& l = llt.matrixL();
  double logdet = 0.0;
  for (Index i = 0; i < m; ++i) {
    const double d = std::real(l(i, i));
    if (!(d > 0.0)) {
      throw std::runtime_error("cscg_loglik: covariance is not positive definite");
    }
    logdet += 2.0 * std::log(d);
  }
  const ComplexVector z = llt.matrixL().solve(y);
  const double quad = z.squaredNorm();
  return -quad - logdet - static_cast<double>(m) * std::log(std::numbers::pi);
}

Complex sample_scg(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

}  // namespace vsp
