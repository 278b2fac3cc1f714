#include "vsp/bench.hpp"

#include "vsp/io.hpp"
#include "vsp/orchestrator.hpp"
#include "vsp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

namespace vsp {
namespace {

const std::vector<std::string> kMatrixKindNames = {
    "scg", "cropped_hermitian", "concat_exp_gauss", "concat_exp", "real_normal"};

}  // namespace

MatrixKind matrix_kind_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kMatrixKindNames.size(); ++i) {
    if (kMatrixKindNames[i] == name) return static_cast<MatrixKind>(i);
  }
  std::string valid;
  for (const auto& k : kMatrixKindNames) valid += (valid.empty() ? "" : ", ") + k;
  throw std::invalid_argument("unknown matrix kind '" + name + "' (valid: " + valid + ")");
}

std::string to_string(MatrixKind kind) {
  return kMatrixKindNames[static_cast<std::size_t>(kind)];
}

const std::vector<std::string>& matrix_kind_names() { return kMatrixKindNames; }

std::pair<Index, double> ExperimentSpec::grid_point(Index g) const {
  const Index snr_count = static_cast<Index>(snr_grid.size());
  const Index im = g / snr_count;
  const Index is = g % snr_count;
  return {m_grid[static_cast<std::size_t>(im)], snr_grid[static_cast<std::size_t>(is)]};
}

void ExperimentSpec::validate() const {
  require(n >= 1, "spec: n must be >= 1");
  require(k >= 1 && k <= n, "spec: k must satisfy 1 <= k <= n");
  require(l >= 1 && l <= k, "spec: l must satisfy 1 <= l <= k");
  require(!m_grid.empty(), "spec: m_grid must be nonempty");
  for (Index m : m_grid) require(m >= 1 && m <= n, "spec: every m must satisfy 1 <= m <= n");
  require(!snr_grid.empty(), "spec: snr_grid must be nonempty");
  require(trials >= 1, "spec: trials must be >= 1");
  if (matrix_kind == MatrixKind::ConcatExpGauss || matrix_kind == MatrixKind::ConcatExp) {
    require(n % 2 == 0, "spec: concatenated matrix kinds require even n");
  }
}

std::pair<ComplexVector, std::vector<Index>> gen_block_sparse_signal(Index n, Index k,
                                                                     Index l, Rng& rng) {
  require(n >= 1 && k >= 1 && l >= 1, "gen_block_sparse_signal: sizes must be >= 1");
  require(l <= k && k <= n, "gen_block_sparse_signal: need l <= k <= n");

  std::exponential_distribution<double> expo(1.0);
  std::vector<Index> block_sizes(static_cast<std::size_t>(l));
  std::vector<Index> super_sizes(static_cast<std::size_t>(l));

  constexpr int kMaxRedraws = 100;
  bool feasible = false;
  for (int attempt = 0; attempt < kMaxRedraws && !feasible; ++attempt) {
    // Normalized exponentials give uniform Dirichlet proportions.
    std::vector<double> r(static_cast<std::size_t>(l));
    double sum = 0.0;
    for (auto& v : r) {
      v = expo(rng);
      sum += v;
    }
    for (auto& v : r) v /= sum;

    Index assigned_k = 0;
    Index assigned_n = 0;
    feasible = true;
    for (Index b = 0; b + 1 < l; ++b) {
      block_sizes[b] = static_cast<Index>(std::ceil(static_cast<double>(k) * r[b]));
      super_sizes[b] = static_cast<Index>(std::ceil(static_cast<double>(n) * r[b]));
      assigned_k += block_sizes[b];
      assigned_n += super_sizes[b];
    }
    block_sizes[l - 1] = k - assigned_k;
    super_sizes[l - 1] = n - assigned_n;
    if (block_sizes[l - 1] <= 0) feasible = false;
    for (Index b = 0; feasible && b < l; ++b) {
      if (super_sizes[b] < block_sizes[b] || super_sizes[b] < 1) feasible = false;
    }
  }
  if (!feasible) {
    throw std::runtime_error("gen_block_sparse_signal: infeasible block geometry");
  }

  ComplexVector x = ComplexVector::Zero(n);
  std::vector<Index> support;
  support.reserve(static_cast<std::size_t>(k));
  Index super_start = 0;
  for (Index b = 0; b < l; ++b) {
    const Index slack = super_sizes[b] - block_sizes[b];
    std::uniform_int_distribution<Index> offset(0, slack);
    const Index start = super_start + offset(rng);
    for (Index i = start; i < start + block_sizes[b]; ++i) {
      x[i] = sample_scg(rng);
      support.push_back(i);
    }
    super_start += super_sizes[b];
  }
  return {std::move(x), std::move(support)};
}

ComplexMatrix gen_matrix(MatrixKind kind, Index m, Index n, Rng& rng) {
  require(m >= 1 && n >= 1 && m <= n, "gen_matrix: need 1 <= m <= n");
  auto scg_matrix = [&rng](Index rows, Index cols) {
    ComplexMatrix a(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) a(r, c) = sample_scg(rng);
    }
    return a;
  };

  switch (kind) {
    case MatrixKind::Scg:
      return scg_matrix(m, n);
    case MatrixKind::CroppedHermitian: {
      const ComplexMatrix a1 = scg_matrix(n, n);
      const ComplexMatrix a2 = a1 * a1.adjoint();
      return a2.topRows(m);
    }
    case MatrixKind::ConcatExpGauss: {
      require(n % 2 == 0, "gen_matrix: concatenated kinds require even n");
      ComplexMatrix a(m, n);
      a.leftCols(n / 2) = scg_matrix(m, n / 2);
      std::exponential_distribution<double> expo3(3.0);
      for (Index r = 0; r < m; ++r) {
        for (Index c = n / 2; c < n; ++c) a(r, c) = Complex(expo3(rng), expo3(rng));
      }
      return a;
    }
    case MatrixKind::ConcatExp: {
      require(n % 2 == 0, "gen_matrix: concatenated kinds require even n");
      ComplexMatrix a(m, n);
      std::exponential_distribution<double> expo3(3.0);
      std::exponential_distribution<double> expo1(1.0);
      for (Index r = 0; r < m; ++r) {
        for (Index c = 0; c < n / 2; ++c) a(r, c) = Complex(expo3(rng), 0.0);
      }
      for (Index r = 0; r < m; ++r) {
        for (Index c = n / 2; c < n; ++c) a(r, c) = Complex(expo1(rng), 0.0);
      }
      return a;
    }
    case MatrixKind::RealNormal: {
      std::normal_distribution<double> normal(0.0, 1.0);
      ComplexMatrix a(m, n);
      for (Index r = 0; r < m; ++r) {
        for (Index c = 0; c < n; ++c) a(r, c) = Complex(normal(rng), 0.0);
      }
      return a;
    }
  }
  throw std::invalid_argument("gen_matrix: invalid kind");
}

double sigma_for_snr(const ComplexMatrix& A, const ComplexVector& x, double snr_db) {
  const double signal_norm = (A * x).norm();
  require(signal_norm > 0.0, "sigma_for_snr: Ax must be nonzero");
  return signal_norm * std::pow(10.0, -snr_db / 20.0);
}

double nmse(const ComplexVector& x_hat, const ComplexVector& x) {
  require(x_hat.size() == x.size(), "nmse: length mismatch");
  const double denom = x.squaredNorm();
  require(denom > 0.0, "nmse: reference signal must be nonzero");
  return (x_hat - x).squaredNorm() / denom;
}

double to_db(double nmse_linear) { return 10.0 * std::log10(nmse_linear); }

ComplexVector genie_lmmse(const ComplexVector& y, const ComplexMatrix& A,
                          const std::vector<Index>& support, double sigma2) {
  require(!support.empty(), "genie_lmmse: support must be nonempty");
  const Index s = static_cast<Index>(support.size());
  ComplexMatrix a_s(A.rows(), s);
  for (Index j = 0; j < s; ++j) {
    const Index col = support[static_cast<std::size_t>(j)];
    require(col >= 0 && col < A.cols(), "genie_lmmse: support index out of range");
    a_s.col(j) = A.col(col);
  }
  ComplexMatrix gram = a_s * a_s.adjoint();
  gram.diagonal().array() += sigma2;
  const ComplexVector x_s = a_s.adjoint() * gram.llt().solve(y);

  ComplexVector x_hat = ComplexVector::Zero(A.cols());
  for (Index j = 0; j < s; ++j) x_hat[support[static_cast<std::size_t>(j)]] = x_s[j];
  return x_hat;
}

namespace {

// Generation order within a trial is fixed: signal, matrix, noise.
void run_one_trial(const ExperimentSpec& spec, Index g, int trial,
                   std::vector<TrialResult>& out) {
  const auto [m, snr_db] = spec.grid_point(g);
  const std::uint64_t seed =
      trial_seed(spec.base_seed, static_cast<std::uint64_t>(g),
                 static_cast<std::uint64_t>(trial));

  TrialResult vsp_row{g, m, snr_db, trial, seed, "vsp", 0.0, 0.0, 0.0, "ok"};
  TrialResult genie_row{g, m, snr_db, trial, seed, "genie", 0.0, 0.0, 0.0, "ok"};
  try {
    Rng rng(seed);
    auto [x, support] = gen_block_sparse_signal(spec.n, spec.k, spec.l, rng);
    const ComplexMatrix A = gen_matrix(spec.matrix_kind, m, spec.n, rng);
    const double sigma_total = sigma_for_snr(A, x, snr_db);
    const double sigma2_component =
        spec.snr_convention == SnrConvention::Total
            ? sigma_total * sigma_total / static_cast<double>(m)
            : sigma_total * sigma_total;
    ComplexVector w(m);
    const double scale = std::sqrt(sigma2_component);
    for (Index i = 0; i < m; ++i) w[i] = scale * sample_scg(rng);
    const ComplexVector y = A * x + w;

    VspConfig config = spec.config;
    config.sigma2 = sigma2_component;
    config.k_sparsity = static_cast<int>(spec.k);

    const auto t0 = std::chrono::steady_clock::now();
    const VspResult result = run_vsp(y, A, config);
    const auto t1 = std::chrono::steady_clock::now();
    vsp_row.nmse = nmse(result.x_hat, x);
    vsp_row.nmse_db = to_db(vsp_row.nmse);
    vsp_row.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    const auto t2 = std::chrono::steady_clock::now();
    const ComplexVector genie = genie_lmmse(y, A, support, sigma2_component);
    const auto t3 = std::chrono::steady_clock::now();
    genie_row.nmse = nmse(genie, x);
    genie_row.nmse_db = to_db(genie_row.nmse);
    genie_row.runtime_ms = std::chrono::duration<double, std::milli>(t3 - t2).count();
  } catch (const std::exception& e) {
    vsp_row.status = e.what();
    genie_row.status = e.what();
    vsp_row.nmse = vsp_row.nmse_db = std::nan("");
    genie_row.nmse = genie_row.nmse_db = std::nan("");
  }
  out[0] = std::move(vsp_row);
  out[1] = std::move(genie_row);
}

}  // namespace

ExperimentResults run_experiment(const ExperimentSpec& spec, int jobs) {
  spec.validate();
  require(jobs >= 1, "run_experiment: jobs must be >= 1");

  const Index grid = spec.grid_size();
  const Index total = grid * spec.trials;
  // Two rows (vsp, genie) per trial, slotted by task index so collection
  // order never affects output order.
  std::vector<std::vector<TrialResult>> slots(static_cast<std::size_t>(total),
                                              std::vector<TrialResult>(2));

  std::atomic<Index> next{0};
  auto worker = [&]() {
    while (true) {
      const Index task = next.fetch_add(1);
      if (task >= total) break;
      const Index g = task / spec.trials;
      const int trial = static_cast<int>(task % spec.trials);
      run_one_trial(spec, g, trial, slots[static_cast<std::size_t>(task)]);
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ExperimentResults results;
  results.trials.reserve(static_cast<std::size_t>(total) * 2);
  for (auto& slot : slots) {
    for (auto& row : slot) results.trials.push_back(std::move(row));
  }

  // Aggregate mean linear NMSE per (grid point, algorithm), then convert to dB.
  std::map<std::pair<Index, std::string>, std::pair<double, std::pair<int, int>>> acc;
  for (const auto& row : results.trials) {
    auto& [sum, counts] = acc[{row.grid_index, row.algorithm}];
    if (row.status == "ok") {
      sum += row.nmse;
      ++counts.first;
    } else {
      ++counts.second;
    }
  }
  for (const auto& [key, value] : acc) {
    const auto [m, snr_db] = spec.grid_point(key.first);
    AggregateRow agg;
    agg.grid_index = key.first;
    agg.m = m;
    agg.snr_db = snr_db;
    agg.algorithm = key.second;
    agg.trial_count = value.second.first;
    agg.failure_count = value.second.second;
    agg.mean_nmse_db =
        agg.trial_count > 0 ? to_db(value.first / agg.trial_count) : std::nan("");
    results.aggregate.push_back(std::move(agg));
  }
  std::sort(results.aggregate.begin(), results.aggregate.end(),
            [](const AggregateRow& a, const AggregateRow& b) {
              if (a.grid_index != b.grid_index) return a.grid_index < b.grid_index;
              return a.algorithm < b.algorithm;
            });
  return results;
}

void write_trials_csv(const std::string& path, const ExperimentSpec& spec,
                      const std::vector<TrialResult>& trials) {
  io::atomic_write(path, [&](std::ostream& os) {
    os << "experiment_id,matrix_kind,N,M,K,L,snr_db,trial,seed,algorithm,"
          "nmse,nmse_db,runtime_ms,status\n";
    for (const auto& row : trials) {
      os << spec.id << ',' << to_string(spec.matrix_kind) << ',' << spec.n << ','
         << row.m << ',' << spec.k << ',' << spec.l << ','
         << io::format_double(row.snr_db) << ',' << row.trial << ',' << row.seed
         << ',' << row.algorithm << ',' << io::format_double(row.nmse) << ','
         << io::format_double(row.nmse_db) << ','
         << io::format_double(row.runtime_ms) << ',' << row.status << '\n';
    }
  });
}

void write_aggregate_csv(const std::string& path, const ExperimentSpec& spec,
                         const std::vector<AggregateRow>& rows) {
  io::atomic_write(path, [&](std::ostream& os) {
    os << "experiment_id,matrix_kind,N,M,K,L,snr_db,algorithm,mean_nmse_db,"
          "trial_count,failure_count\n";
    for (const auto& row : rows) {
      os << spec.id << ',' << to_string(spec.matrix_kind) << ',' << spec.n << ','
         << row.m << ',' << spec.k << ',' << spec.l << ','
         << io::format_double(row.snr_db) << ',' << row.algorithm << ','
         << io::format_double(row.mean_nmse_db) << ',' << row.trial_count << ','
         << row.failure_count << '\n';
    }
  });
}

void write_plot_script(const std::string& path, const ExperimentSpec& spec,
                       const std::string& aggregate_csv_name) {
  const bool snr_sweep = spec.snr_grid.size() > 1;
  const std::string x_label = snr_sweep ? "SNR (dB)" : "Number of measurements M";
  const int x_col = snr_sweep ? 7 : 4;  // 1-based columns in the aggregate CSV
  io::atomic_write(path, [&](std::ostream& os) {
    os << "set datafile separator ','\n"
       << "set key top right\n"
       << "set grid\n"
       << "set xlabel '" << x_label << "'\n"
       << "set ylabel 'NMSE (dB)'\n"
       << "set title '" << spec.id << " (" << to_string(spec.matrix_kind) << ")'\n"
       << "plot '" << aggregate_csv_name << "' using " << x_col
       << ":( strcol(8) eq 'vsp' ? column(9) : 1/0 ) with linespoints title 'VSP', \\\n"
       << "     '" << aggregate_csv_name << "' using " << x_col
       << ":( strcol(8) eq 'genie' ? column(9) : 1/0 ) with linespoints title 'Genie bound'\n"
       << "pause -1 'press enter to close'\n";
  });
}

}  // namespace vsp
