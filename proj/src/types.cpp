#include "vsp/types.hpp"

#include <algorithm>

namespace vsp {

int VspConfig::effective_k(Index n) const {
  if (k_sparsity > 0) return k_sparsity;
  const auto derived = static_cast<int>(std::llround(mrf.rho * static_cast<double>(n)));
  return std::max(1, derived);
}

void VspConfig::validate(Index n) const {
  require(n >= 1, "config: signal length must be >= 1");
  require(gamma.valid(), "config: gamma requires a > 0, b > 0");
  require(mrf.valid(), "config: mrf requires beta >= 0 and rho in [0,1]");
  require(t_out >= 1, "config: t_out must be >= 1");
  require(t_in >= 1, "config: t_in must be >= 1");
  require(vartheta >= 1.0 && vartheta <= 2.0, "config: vartheta must lie in [1,2]");
  require(sigma2 > 0.0 && std::isfinite(sigma2), "config: sigma2 must be positive");
  require(k_sparsity >= 0, "config: k_sparsity must be >= 0");
  require(effective_k(n) <= n, "config: k_sparsity must be <= N");
  require(mrf_sweeps >= 1, "config: mrf_sweeps must be >= 1");
  require(pi_floor > 0.0 && pi_floor < 1.0, "config: pi_floor must lie in (0,1)");
  require(init_mu >= 0.0, "config: init_mu must be >= 0");
  require(line_search.valid(), "config: line search requires eps0 > 0, shrink in (0,1)");
  if (topology.kind == TopologySpec::Kind::Grid) {
    require(topology.rows >= 1 && topology.cols >= 1,
            "config: grid topology requires positive rows and cols");
    require(topology.rows * topology.cols == n,
            "config: grid topology requires rows * cols == N");
  }
}

}  // namespace vsp
