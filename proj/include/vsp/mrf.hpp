#pragma once

#include "vsp/types.hpp"

#include <span>
#include <vector>

namespace vsp {

/// Neighbor structure of the hidden-state field: a 1-D chain or a
/// 4-connected rows x cols grid. Adjacency is symmetric and stored in CSR
/// form; each directed edge j -> neighbors(j)[p] owns one message slot.
class MrfTopology {
 public:
  static MrfTopology chain(Index n);
  static MrfTopology grid(Index rows, Index cols);
  static MrfTopology from_spec(const TopologySpec& spec, Index n);

  Index size() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index num_directed_edges() const { return static_cast<Index>(targets_.size()); }

  std::span<const Index> neighbors(Index i) const {
    return {targets_.data() + offsets_[i],
            static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
  }
  /// First message slot owned by node i; slot p under i carries the message
  /// i -> neighbors(i)[p].
  Index slot_begin(Index i) const { return offsets_[i]; }
  /// Slot of the reverse edge: for slot p = (j -> i), reverse_slot(p) = (i -> j).
  Index reverse_slot(Index slot) const { return reverse_[slot]; }

 private:
  MrfTopology() = default;
  void finalize();  // builds reverse-slot map, checks symmetry

  std::vector<Index> offsets_;  // size N+1
  std::vector<Index> targets_;  // flattened neighbor lists
  std::vector<Index> reverse_;
};

/// Bernoulli parameters lambda(j -> i) = message belief that s_i = +1,
/// one per directed edge in topology slot order.
struct MessageBoard {
  std::vector<double> lambda;
  int degeneracy_count = 0;  // edges that hit the 0/0 ratio and were reset to 1/2

  static MessageBoard uniform(const MrfTopology& topo);
};

/// One raster-order sweep over every directed edge, reading the freshest
/// available messages. Degenerate 0/0 ratios yield an uninformative 1/2 and
/// bump the board's degeneracy counter. `damping` blends old and new
/// messages (1 = no damping).
MessageBoard mrf_sweep(const RealVector& pi_in, const MrfTopology& topo,
                       double alpha, double beta, const MessageBoard& board,
                       double damping = 1.0);

/// Runs `sweeps` message sweeps from the uniform board (early exit when the
/// largest message change drops below 1e-8) and returns the per-node output
/// beliefs pi(s_i = +1). Optionally reports the degeneracy count.
RealVector mrf_output(const RealVector& pi_in, const MrfTopology& topo,
                      double alpha, double beta, int sweeps,
                      double damping = 1.0, int* degeneracies = nullptr);

}  // namespace vsp
