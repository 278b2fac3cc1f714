#pragma once

#include "vsp/model.hpp"
#include "vsp/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vsp {

enum class MatrixKind { Scg, CroppedHermitian, ConcatExpGauss, ConcatExp, RealNormal };

/// Parses one of: scg, cropped_hermitian, concat_exp_gauss, concat_exp,
/// real_normal. Throws std::invalid_argument listing the valid kinds.
MatrixKind matrix_kind_from_string(const std::string& name);
std::string to_string(MatrixKind kind);
const std::vector<std::string>& matrix_kind_names();

/// Whether sigma in the SNR definition is the total noise standard
/// deviation (per-component variance sigma^2 / M) or per-component.
enum class SnrConvention { Total, PerComponent };

/// One benchmark sweep: the Cartesian grid of m_grid x snr_grid, `trials`
/// seeded trials per grid point.
struct ExperimentSpec {
  std::string id = "experiment";
  Index n = 0;
  std::vector<Index> m_grid;
  Index k = 0;
  Index l = 0;
  std::vector<double> snr_grid;
  MatrixKind matrix_kind = MatrixKind::Scg;
  int trials = 1;
  std::uint64_t base_seed = 0;
  SnrConvention snr_convention = SnrConvention::Total;
  VspConfig config;  // solver settings; sigma2 / k_sparsity are set per trial

  Index grid_size() const {
    return static_cast<Index>(m_grid.size() * snr_grid.size());
  }
  /// Grid point g enumerates m_grid (outer) x snr_grid (inner).
  std::pair<Index, double> grid_point(Index g) const;
  void validate() const;
};

struct TrialResult {
  Index grid_index = 0;
  Index m = 0;
  double snr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string algorithm;  // "vsp" or "genie"
  double nmse = 0.0;
  double nmse_db = 0.0;
  double runtime_ms = 0.0;
  std::string status = "ok";  // "ok" or an error tag
};

struct AggregateRow {
  Index grid_index = 0;
  Index m = 0;
  double snr_db = 0.0;
  std::string algorithm;
  double mean_nmse_db = 0.0;  // dB of the mean linear NMSE
  int trial_count = 0;
  int failure_count = 0;
};

struct ExperimentResults {
  std::vector<TrialResult> trials;  // ordered by (grid, trial, algorithm)
  std::vector<AggregateRow> aggregate;
};

/// Block-sparse test signal: exactly k nonzeros in l blocks, block sizes
/// proportional to a random partition, each block placed uniformly inside
/// its super-block. Nonzeros are unit-variance SCG. Returns the signal and
/// its support indices (sorted).
std::pair<ComplexVector, std::vector<Index>> gen_block_sparse_signal(Index n, Index k,
                                                                     Index l, Rng& rng);

ComplexMatrix gen_matrix(MatrixKind kind, Index m, Index n, Rng& rng);

/// Total noise standard deviation sigma = ||Ax|| * 10^(-snr_db / 20).
double sigma_for_snr(const ComplexMatrix& A, const ComplexVector& x, double snr_db);

/// ||x_hat - x||^2 / ||x||^2.
double nmse(const ComplexVector& x_hat, const ComplexVector& x);
double to_db(double nmse_linear);

/// LMMSE estimate with the true support known: unit-variance SCG prior on
/// the supported coefficients, zeros elsewhere.
ComplexVector genie_lmmse(const ComplexVector& y, const ComplexMatrix& A,
                          const std::vector<Index>& support, double sigma2);

/// Runs every (grid point, trial) pair on a pool of `jobs` workers. Trial
/// seeds derive from (base_seed, grid, trial) alone, so results do not
/// depend on the worker count. Failed trials carry an error status and are
/// excluded from aggregates.
ExperimentResults run_experiment(const ExperimentSpec& spec, int jobs = 1);

/// CSV / plot-script emission (atomic writes).
void write_trials_csv(const std::string& path, const ExperimentSpec& spec,
                      const std::vector<TrialResult>& trials);
void write_aggregate_csv(const std::string& path, const ExperimentSpec& spec,
                         const std::vector<AggregateRow>& rows);
void write_plot_script(const std::string& path, const ExperimentSpec& spec,
                       const std::string& aggregate_csv_name);

}  // namespace vsp
