#include "vsp/mrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vsp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSweepTol = 1e-8;

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

MrfTopology MrfTopology::chain(Index n) {
  require(n >= 1, "MrfTopology::chain: n must be >= 1");
  MrfTopology topo;
  topo.offsets_.reserve(n + 1);
  topo.offsets_.push_back(0);
  for (Index i = 0; i < n; ++i) {
    if (i > 0) topo.targets_.push_back(i - 1);
    if (i + 1 < n) topo.targets_.push_back(i + 1);
    topo.offsets_.push_back(static_cast<Index>(topo.targets_.size()));
  }
  topo.finalize();
  return topo;
}

MrfTopology MrfTopology::grid(Index rows, Index cols) {
  require(rows >= 1 && cols >= 1, "MrfTopology::grid: dimensions must be >= 1");
  MrfTopology topo;
  const Index n = rows * cols;
  topo.offsets_.reserve(n + 1);
  topo.offsets_.push_back(0);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      // 4-connected, raster index r * cols + c
      if (c > 0) topo.targets_.push_back(r * cols + c - 1);
      if (c + 1 < cols) topo.targets_.push_back(r * cols + c + 1);
      if (r > 0) topo.targets_.push_back((r - 1) * cols + c);
      if (r + 1 < rows) topo.targets_.push_back((r + 1) * cols + c);
      topo.offsets_.push_back(static_cast<Index>(topo.targets_.size()));
    }
  }
  topo.finalize();
  return topo;
}

MrfTopology MrfTopology::from_spec(const TopologySpec& spec, Index n) {
  if (spec.kind == TopologySpec::Kind::Grid) {
    require(spec.rows * spec.cols == n, "MrfTopology: grid rows * cols must equal N");
    return grid(spec.rows, spec.cols);
  }
  return chain(n);
}

void MrfTopology::finalize() {
  reverse_.assign(targets_.size(), -1);
  const Index n = size();
  for (Index j = 0; j < n; ++j) {
    for (Index p = offsets_[j]; p < offsets_[j + 1]; ++p) {
      const Index i = targets_[p];
      require(i >= 0 && i < n && i != j, "MrfTopology: neighbor index out of range");
      const auto begin = targets_.begin() + offsets_[i];
      const auto end = targets_.begin() + offsets_[i + 1];
      const auto back = std::find(begin, end, j);
      require(back != end, "MrfTopology: adjacency must be symmetric");
      reverse_[p] = static_cast<Index>(back - targets_.begin());
    }
  }
}

MessageBoard MessageBoard::uniform(const MrfTopology& topo) {
  MessageBoard board;
  board.lambda.assign(static_cast<std::size_t>(topo.num_directed_edges()), 0.5);
  return board;
}

MessageBoard mrf_sweep(const RealVector& pi_in, const MrfTopology& topo,
                       double alpha, double beta, const MessageBoard& board,
                       double damping) {
  const Index n = topo.size();
  require(pi_in.size() == n, "mrf_sweep: pi_in length must match topology");
  require((pi_in.array() >= 0.0).all() && (pi_in.array() <= 1.0).all(),
          "mrf_sweep: pi_in must lie in [0,1]");
  require(board.lambda.size() == static_cast<std::size_t>(topo.num_directed_edges()),
          "mrf_sweep: board does not match topology");
  require(damping > 0.0 && damping <= 1.0, "mrf_sweep: damping must lie in (0,1]");

  MessageBoard next = board;
  const double log_2cosh_beta = log_sum_exp(beta, -beta);

  for (Index j = 0; j < n; ++j) {
    const auto nbrs = topo.neighbors(j);
    const Index base = topo.slot_begin(j);
    const double log_pi = safe_log(pi_in[j]);
    const double log_1mpi = safe_log(1.0 - pi_in[j]);

    for (Index p = 0; p < static_cast<Index>(nbrs.size()); ++p) {
      // Message j -> nbrs[p].  Cavity products run over messages into j
      // from every neighbor except nbrs[p]; the freshest values are used.
      double log_prod_on = 0.0;
      double log_prod_off = 0.0;
      for (Index q = 0; q < static_cast<Index>(nbrs.size()); ++q) {
        if (q == p) continue;
        const double incoming = next.lambda[topo.reverse_slot(base + q)];
        log_prod_on += safe_log(incoming);
        log_prod_off += safe_log(1.0 - incoming);
      }
      const double num =
          log_sum_exp(log_pi - alpha + beta + log_prod_on,
                      log_1mpi + alpha - beta + log_prod_off);
      const double den =
          log_sum_exp(log_pi - alpha + log_prod_on,
                      log_1mpi + alpha + log_prod_off) +
          log_2cosh_beta;

      double value;
      if (num == kNegInf && den == kNegInf) {
        value = 0.5;  // 0/0: both support states ruled out, fall back to uninformative
        ++next.degeneracy_count;
      } else {
        value = std::exp(num - den);
      }
      const std::size_t slot = static_cast<std::size_t>(base + p);
      next.lambda[slot] = damping * value + (1.0 - damping) * next.lambda[slot];
    }
  }
  return next;
}

RealVector mrf_output(const RealVector& pi_in, const MrfTopology& topo,
                      double alpha, double beta, int sweeps, double damping,
                      int* degeneracies) {
  require(sweeps >= 1, "mrf_output: sweeps must be >= 1");
  const Index n = topo.size();

  MessageBoard board = MessageBoard::uniform(topo);
  for (int s = 0; s < sweeps; ++s) {
    MessageBoard next = mrf_sweep(pi_in, topo, alpha, beta, board, damping);
    double max_change = 0.0;
    for (std::size_t e = 0; e < next.lambda.size(); ++e) {
      max_change = std::max(max_change, std::abs(next.lambda[e] - board.lambda[e]));
    }
    board = std::move(next);
    if (max_change < kSweepTol) break;
  }
  if (degeneracies) *degeneracies = board.degeneracy_count;

  RealVector out(n);
  for (Index i = 0; i < n; ++i) {
    double log_prod_on = 0.0;
    double log_prod_off = 0.0;
    const auto nbrs = topo.neighbors(i);
    const Index base = topo.slot_begin(i);
    for (Index p = 0; p < static_cast<Index>(nbrs.size()); ++p) {
      const double incoming = board.lambda[topo.reverse_slot(base + p)];
      log_prod_on += safe_log(incoming);
      log_prod_off += safe_log(1.0 - incoming);
    }
    const double on = -alpha + log_prod_on;
    const double off = alpha + log_prod_off;
    if (on == kNegInf && off == kNegInf) {
      out[i] = 0.5;
    } else {
      out[i] = std::exp(on - log_sum_exp(on, off));
    }
  }
  return out;
}

}  // namespace vsp
