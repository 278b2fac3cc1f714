#pragma once

#include "vsp/types.hpp"

#include <vector>

namespace vsp {

/// One gradient-descent round as executed.
struct GdRound {
  double epsilon = 0.0;    // accepted step size; 0 when the round was a no-op
  bool accepted = false;   // false when no step satisfied the acceptance rule
  double chi_after = 0.0;  // chi at the state kept after this round
};

struct GdTrace {
  double chi_initial = 0.0;
  std::vector<GdRound> rounds;
  int noop_rounds = 0;
};

/// Gradient descent on chi with a common backtracked step size.
/// Each round takes the largest step eps0 * shrink^k (k = 0..max_halvings)
/// whose candidate mu - eps * grad, clamped to the positive floor, does not
/// increase chi. Rounds with no acceptable step leave mu unchanged and are
/// flagged in the trace. chi_rel_exit > 0 stops early once the relative chi
/// change per round drops below it; the default runs all t_in rounds.
RealVector gd_solve(const ComplexMatrix& A, const ComplexVector& y,
                    const RealVector& mu_in, int t_in, double sigma2,
                    const LineSearchParams& ls, GdTrace* trace = nullptr,
                    double chi_rel_exit = 0.0);

}  // namespace vsp
