#include "vsp/posterior.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace vsp {
namespace {

void check_inputs(const ComplexMatrix& A, const ComplexVector& y,
                  const RealVector& v, double sigma2) {
  require(A.rows() == y.size(), "posterior: rows(A) must equal len(y)");
  require(A.cols() == v.size(), "posterior: cols(A) must equal len(v)");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "posterior: sigma2 must be positive");
  require(A.allFinite() && y.allFinite() && v.allFinite(),
          "posterior: non-finite input");
  require((v.array() >= 0.0).all(), "posterior: variances must be nonnegative");
}

// Cholesky factor of Sigma_y = A D A^H + sigma2 I together with ln det.
struct MeasurementCov {
  Eigen::LLT<ComplexMatrix> llt;
  double logdet = 0.0;
};

MeasurementCov factor_measurement_cov(const ComplexMatrix& A, const RealVector& v,
                                      double sigma2) {
  const Index m = A.rows();
  ComplexMatrix sigma_y = A * v.asDiagonal() * A.adjoint();
  sigma_y.diagonal().array() += sigma2;

  MeasurementCov cov;
  cov.llt.compute(sigma_y);
  if (cov.llt.info() != Eigen::Success) {
    throw std::runtime_error("posterior: measurement covariance is numerically singular");
  }
  const auto& l = cov.llt.matrixL();
  for (Index i = 0; i < m; ++i) {
    const double d = std::real(l(i, i));
    if (!(d > 0.0)) {
      throw std::runtime_error("posterior: measurement covariance is numerically singular");
    }
    cov.logdet += 2.0 * std::log(d);
  }
  return cov;
}

void check_positive(const RealVector& v) {
  if (!(v.array() > 0.0).all()) {
    throw std::domain_error("chi: variances must be strictly positive (floor first)");
  }
}

}  // namespace

double variance_floor(const RealVector& v) {
  const double peak = v.size() > 0 ? v.maxCoeff() : 0.0;
  return 1e-12 * std::max(peak, 1.0);
}

RealVector apply_variance_floor(const RealVector& v) {
  return v.cwiseMax(variance_floor(v));
}

PosteriorMoments posterior_moments(const ComplexMatrix& A, const ComplexVector& y,
                                   const RealVector& v, double sigma2,
                                   bool with_full_phi) {
  check_inputs(A, y, v, sigma2);
  const MeasurementCov cov = factor_measurement_cov(A, v, sigma2);

  PosteriorMoments out;
  // m = D A^H Sigma_y^{-1} y.
  const ComplexVector z = cov.llt.solve(y);
  out.m = v.asDiagonal() * (A.adjoint() * z);

  // phi_ii = v_i - v_i^2 * a_i^H Sigma_y^{-1} a_i; clamp roundoff below zero.
  const ComplexMatrix s = cov.llt.solve(A);
  const RealVector q = A.conjugate().cwiseProduct(s).colwise().sum().real().transpose();
  out.phi_diag =
      (v.array() - v.array().square() * q.array()).max(0.0).matrix();

  if (with_full_phi) {
    const ComplexMatrix ds_adj = v.asDiagonal() * A.adjoint();  // D A^H
    ComplexMatrix phi = -ds_adj * cov.llt.solve(ds_adj.adjoint());
    phi.diagonal() += v.cast<Complex>();
    phi = ((phi + phi.adjoint()) / 2.0).eval();  // restore exact Hermitian symmetry
    out.phi = std::move(phi);
  }
  return out;
}

double chi(const ComplexMatrix& A, const ComplexVector& y, const RealVector& v,
           double sigma2) {
  check_positive(v);
  check_inputs(A, y, v, sigma2);
  const Index m_rows = A.rows();
  const MeasurementCov cov = factor_measurement_cov(A, v, sigma2);

  // chi = -sigma^{-2} y^H A m - ln|Phi| + sum ln v_i.  With
  // m = D A^H Sigma_y^{-1} y and ln|Phi| = sum ln v_i - ln|Sigma_y| + M ln sigma2,
  // the sum-ln terms cancel:
  //   chi = -sigma^{-2} Re(y^H A m) + ln|Sigma_y| - M ln sigma2.
  const ComplexVector z = cov.llt.solve(y);
  const ComplexVector m = v.asDiagonal() * (A.adjoint() * z);
  const double data_term = std::real((A.adjoint() * y).dot(m)) / sigma2;
  return -data_term + cov.logdet - static_cast<double>(m_rows) * std::log(sigma2);
}

RealVector chi_gradient(const ComplexMatrix& A, const ComplexVector& y,
                        const RealVector& v, double sigma2) {
  check_positive(v);
  check_inputs(A, y, v, sigma2);
  const MeasurementCov cov = factor_measurement_cov(A, v, sigma2);

  // With r = A^H Sigma_y^{-1} y and q_i = a_i^H Sigma_y^{-1} a_i, the terms
  // -|m_i|^2 / v_i^2 - phi_ii / v_i^2 + 1 / v_i collapse to q_i - |r_i|^2,
  // which avoids dividing by small variances.
  const ComplexVector r = A.adjoint() * cov.llt.solve(y);
  const ComplexMatrix s = cov.llt.solve(A);
  const RealVector q = A.conjugate().cwiseProduct(s).colwise().sum().real().transpose();
  return q - r.cwiseAbs2();
}

}  // namespace vsp
