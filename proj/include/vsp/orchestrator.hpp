#pragma once

#include "vsp/solver_gd.hpp"
#include "vsp/types.hpp"

#include <stdexcept>
#include <vector>

namespace vsp {

/// Sample mean of the k_prime largest entries of mu_g_to_v; ties broken by
/// lower index first.
double kappa(const RealVector& mu_g_to_v, Index k_prime);

/// Activity probabilities from variance means: pi_i = min(mu_i / kappa, 1).
RealVector pi_from_mu(const RealVector& mu_g_to_v, double kappa_val);

/// Variance means from activity probabilities: mu_i = kappa * max(pi_i, pi_floor).
/// The floor keeps pruned coordinates revivable in later outer rounds.
RealVector mu_from_pi(const RealVector& pi_s_to_f, double kappa_val, double pi_floor);

struct VspDiagnostics {
  std::vector<double> chi_per_round;    // chi at the solver output, floored
  std::vector<double> kappa_per_round;  // one entry per message exchange
  std::vector<RealVector> pi_f_to_s_per_round;
  std::vector<RealVector> pi_s_to_f_per_round;
  std::vector<GdTrace> gd_traces;  // GD solver only
  int mrf_degeneracies = 0;
  bool degenerate_kappa = false;  // outer loop stopped on a nonpositive kappa
};

struct VspResult {
  ComplexVector x_hat;
  BeliefState beliefs;
  VspDiagnostics diagnostics;
};

/// Thrown when an outer round produces non-finite state; carries the
/// diagnostics collected up to the failure.
struct VspAbort : std::runtime_error {
  VspAbort(const std::string& msg, VspDiagnostics diag)
      : std::runtime_error(msg), diagnostics(std::move(diag)) {}
  VspDiagnostics diagnostics;
};

/// The full variance-state-propagation loop: alternates the inner variance
/// solver with one MRF pass, coupling them through kappa-scaled moment
/// matching, and returns the posterior mean at the final variances.
VspResult run_vsp(const ComplexVector& y, const ComplexMatrix& A,
                  const VspConfig& config);

}  // namespace vsp
