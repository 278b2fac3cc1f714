#include "vsp/orchestrator.hpp"

#include "vsp/mrf.hpp"
#include "vsp/posterior.hpp"
#include "vsp/solver_elbo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vsp {

double kappa(const RealVector& mu_g_to_v, Index k_prime) {
  const Index n = mu_g_to_v.size();
  require(k_prime >= 1 && k_prime <= n, "kappa: k_prime out of range");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + k_prime, order.end(),
                    [&](Index a, Index b) {
                      if (mu_g_to_v[a] != mu_g_to_v[b]) return mu_g_to_v[a] > mu_g_to_v[b];
                      return a < b;
                    });
  double sum = 0.0;
  for (Index h = 0; h < k_prime; ++h) sum += mu_g_to_v[order[static_cast<std::size_t>(h)]];
  return sum / static_cast<double>(k_prime);
}

RealVector pi_from_mu(const RealVector& mu_g_to_v, double kappa_val) {
  require(kappa_val > 0.0 && std::isfinite(kappa_val),
          "pi_from_mu: kappa must be positive");
  return (mu_g_to_v.array() / kappa_val).min(1.0).matrix();
}

RealVector mu_from_pi(const RealVector& pi_s_to_f, double kappa_val, double pi_floor) {
  return kappa_val * pi_s_to_f.cwiseMax(pi_floor);
}

namespace {

RealVector initial_variances(const ComplexVector& y, const ComplexMatrix& A,
                             const VspConfig& config, int k) {
  const Index n = A.cols();
  if (config.init_mu > 0.0) return RealVector::Constant(n, config.init_mu);
  // Crude per-active-coordinate power estimate; the printed all-zero start
  // is an absorbing fixed point of the dual-form posterior.
  const double energy = A.squaredNorm();
  double level = energy > 0.0
                     ? y.squaredNorm() / energy * static_cast<double>(n) / k
                     : 1.0;
  if (!(level > 0.0)) level = 1.0;
  return RealVector::Constant(n, level);
}

}  // namespace

VspResult run_vsp(const ComplexVector& y, const ComplexMatrix& A,
                  const VspConfig& config) {
  const Index n = A.cols();
  require(A.rows() == y.size(), "run_vsp: rows(A) must equal len(y)");
  config.validate(n);

  const int k = config.effective_k(n);
  const Index k_prime = std::clamp<Index>(
      static_cast<Index>(std::llround(config.vartheta * k)), 1, n);
  const MrfTopology topo = MrfTopology::from_spec(config.topology, n);

  VspResult result;
  VspDiagnostics& diag = result.diagnostics;
  BeliefState& beliefs = result.beliefs;
  beliefs.mu_v_to_g = initial_variances(y, A, config, k);

  for (int t = 0; t < config.t_out; ++t) {
    if (config.solver == SolverKind::GD) {
      GdTrace trace;
      beliefs.mu_g_to_v = gd_solve(A, y, beliefs.mu_v_to_g, config.t_in,
                                   config.sigma2, config.line_search, &trace);
      diag.gd_traces.push_back(std::move(trace));
    } else {
      beliefs.mu_g_to_v = elbo_solve(A, y, beliefs.mu_v_to_g, config.t_in,
                                     config.sigma2);
    }
    if (!beliefs.mu_g_to_v.allFinite()) {
      throw VspAbort("run_vsp: solver produced non-finite variances", diag);
    }
    diag.chi_per_round.push_back(
        chi(A, y, apply_variance_floor(beliefs.mu_g_to_v), config.sigma2));

    if (t + 1 >= config.t_out) break;

    const double kappa_val = kappa(beliefs.mu_g_to_v, k_prime);
    diag.kappa_per_round.push_back(kappa_val);
    if (!(kappa_val > 0.0)) {
      // Degenerate variance estimate: keep the current beliefs and stop
      // exchanging messages.
      diag.degenerate_kappa = true;
      break;
    }

    beliefs.pi_f_to_s = pi_from_mu(beliefs.mu_g_to_v, kappa_val);
    int degeneracies = 0;
    beliefs.pi_s_to_f =
        mrf_output(beliefs.pi_f_to_s, topo, config.mrf.alpha, config.mrf.beta,
                   config.mrf_sweeps, 1.0, &degeneracies);
    diag.mrf_degeneracies += degeneracies;
    diag.pi_f_to_s_per_round.push_back(beliefs.pi_f_to_s);
    diag.pi_s_to_f_per_round.push_back(beliefs.pi_s_to_f);

    beliefs.mu_v_to_g = mu_from_pi(beliefs.pi_s_to_f, kappa_val, config.pi_floor);
    if (!beliefs.mu_v_to_g.allFinite()) {
      throw VspAbort("run_vsp: message exchange produced non-finite variances", diag);
    }
  }

  result.x_hat = posterior_moments(A, y, beliefs.mu_g_to_v, config.sigma2).m;
  if (!result.x_hat.allFinite()) {
    throw VspAbort("run_vsp: final posterior mean is non-finite", diag);
  }
  return result;
}

}  // namespace vsp
