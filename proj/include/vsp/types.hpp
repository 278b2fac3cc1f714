#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vsp {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Shape/rate parameters of a Gamma distribution.
struct GammaParams {
  double a = 1e-10;  // shape > 0
  double b = 1e-10;  // rate > 0

  bool valid() const {
    return a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b) &&
           std::isfinite(a / b);
  }
};

/// Ising-field parameters of the hidden support states.
struct MrfParams {
  double alpha = 0.3;  // sparsity bias; larger favors sparser signals
  double beta = 0.8;   // coupling strength >= 0; larger favors bigger blocks
  double rho = 0.1;    // nonzero fraction in [0,1]; only defaults K

  bool valid() const {
    return beta >= 0.0 && rho >= 0.0 && rho <= 1.0 && std::isfinite(alpha) &&
           std::isfinite(beta);
  }
};

enum class SolverKind { GD, ELBO };

struct LineSearchParams {
  double eps0 = 1.0;      // initial step
  double shrink = 0.5;    // backtracking factor in (0,1)
  int max_halvings = 40;

  bool valid() const {
    return eps0 > 0.0 && shrink > 0.0 && shrink < 1.0 && max_halvings >= 1;
  }
};

/// Describes the neighbor structure of the state field without
/// materializing it; Chain uses the signal length, Grid must satisfy
/// rows * cols == N.
struct TopologySpec {
  enum class Kind { Chain, Grid };
  Kind kind = Kind::Chain;
  Index rows = 0;
  Index cols = 0;

  static TopologySpec chain() { return {}; }
  static TopologySpec grid(Index rows, Index cols) {
    return {Kind::Grid, rows, cols};
  }
};

/// All hyperparameters of one VSP run.
struct VspConfig {
  GammaParams gamma;
  MrfParams mrf;
  int t_out = 2;          // outer rounds
  int t_in = 30;          // inner solver rounds
  double vartheta = 2.0;  // K' = round(vartheta * K), vartheta in [1,2]
  double sigma2 = 0.0;    // per-component noise variance (known)
  int k_sparsity = 0;     // K; 0 derives round(rho * N)
  SolverKind solver = SolverKind::ELBO;
  TopologySpec topology;
  int mrf_sweeps = 10;
  double pi_floor = 1e-4;    // keeps pruned coordinates revivable
  double init_mu = 0.0;      // 0 selects the scale-aware default
  LineSearchParams line_search;

  /// K used for the K'-largest statistic: k_sparsity when set, else
  /// round(rho * N) clamped to at least 1.
  int effective_k(Index n) const;

  /// Throws std::invalid_argument naming the offending field.
  void validate(Index n) const;
};

/// Per-coordinate quantities exchanged between the linear and MRF modules.
struct BeliefState {
  RealVector mu_v_to_g;  // variance means entering the linear module
  RealVector mu_g_to_v;  // variance means leaving the linear module
  RealVector pi_f_to_s;  // activity probabilities entering the MRF
  RealVector pi_s_to_f;  // activity probabilities leaving the MRF
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace vsp
