#include "vsp/solver_elbo.hpp"

#include "vsp/posterior.hpp"

namespace vsp {

RealVector elbo_solve(const ComplexMatrix& A, const ComplexVector& y,
                      const RealVector& mu_in, int t_in, double sigma2) {
  require((mu_in.array() >= 0.0).all(), "elbo_solve: mu_in must be nonnegative");
  require(t_in >= 1, "elbo_solve: t_in must be >= 1");

  RealVector mu = mu_in;
  for (int t = 0; t < t_in; ++t) {
    const PosteriorMoments post = posterior_moments(A, y, mu, sigma2);
    mu = post.m.cwiseAbs2() + post.phi_diag;
  }
  return mu;
}

}  // namespace vsp
