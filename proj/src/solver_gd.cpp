#include "vsp/solver_gd.hpp"

#include "vsp/posterior.hpp"

#include <cmath>

namespace vsp {

RealVector gd_solve(const ComplexMatrix& A, const ComplexVector& y,
                    const RealVector& mu_in, int t_in, double sigma2,
                    const LineSearchParams& ls, GdTrace* trace,
                    double chi_rel_exit) {
  require((mu_in.array() >= 0.0).all(), "gd_solve: mu_in must be nonnegative");
  require(t_in >= 1, "gd_solve: t_in must be >= 1");
  require(ls.valid(), "gd_solve: invalid line search parameters");
  require(chi_rel_exit >= 0.0, "gd_solve: chi_rel_exit must be >= 0");

  RealVector mu = apply_variance_floor(mu_in);
  double chi_cur = chi(A, y, mu, sigma2);
  if (trace) {
    trace->chi_initial = chi_cur;
    trace->rounds.clear();
    trace->noop_rounds = 0;
  }

  for (int t = 0; t < t_in; ++t) {
    const double chi_before = chi_cur;
    const RealVector grad = chi_gradient(A, y, mu, sigma2);
    const double floor = variance_floor(mu);

    GdRound round;
    double eps = ls.eps0;
    for (int k = 0; k <= ls.max_halvings; ++k, eps *= ls.shrink) {
      const RealVector candidate = (mu - eps * grad).cwiseMax(floor);
      const double chi_candidate = chi(A, y, candidate, sigma2);
      if (chi_candidate <= chi_cur) {
        mu = candidate;
        chi_cur = chi_candidate;
        round = {eps, true, chi_candidate};
        break;
      }
    }
    if (!round.accepted) {
      round.chi_after = chi_cur;  // state unchanged
      if (trace) ++trace->noop_rounds;
    }
    if (trace) trace->rounds.push_back(round);
    if (chi_rel_exit > 0.0 &&
        std::abs(chi_before - chi_cur) <= chi_rel_exit * std::max(1.0, std::abs(chi_before))) {
      break;
    }
  }
  return mu;
}

}  // namespace vsp
