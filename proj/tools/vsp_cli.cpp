// Command-line front end: recover a single instance, run benchmark sweeps,
// generate reproducible test fixtures.
#include <CLI11.hpp>
#include <json.hpp>

#include "vsp/bench.hpp"
#include "vsp/io.hpp"
#include "vsp/model.hpp"
#include "vsp/orchestrator.hpp"
#include "vsp/rng.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vsp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// shared config flags

struct ConfigFlags {
  VspConfig config;
  std::string solver = "elbo";
  std::string snr_convention = "total";
  Index grid_rows = 0;
  Index grid_cols = 0;
  std::string config_file;  // consumed before parsing; kept for help/UX

  void attach(CLI::App* cmd) {
    auto opt = [&](const std::string& name, auto& target, const std::string& help) {
      // Config-file values are injected ahead of explicit flags, so the
      // last occurrence (the flag) wins.
      cmd->add_option(name, target, help)
          ->capture_default_str()
          ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    opt("--solver", solver, "inner solver: gd or elbo");
    opt("--t-out", config.t_out, "outer rounds");
    opt("--t-in", config.t_in, "inner solver rounds");
    opt("--alpha", config.mrf.alpha, "MRF sparsity bias");
    opt("--beta", config.mrf.beta, "MRF coupling strength");
    opt("--rho", config.mrf.rho, "nonzero fraction (defaults K)");
    opt("--vartheta", config.vartheta, "K' = round(vartheta K), in [1,2]");
    opt("--k-sparsity", config.k_sparsity, "sparsity K (0 derives from rho)");
    opt("--gamma-a", config.gamma.a, "Gamma shape");
    opt("--gamma-b", config.gamma.b, "Gamma rate");
    opt("--mrf-sweeps", config.mrf_sweeps, "message sweeps per MRF pass");
    opt("--pi-floor", config.pi_floor, "revival floor on activity");
    opt("--init-mu", config.init_mu, "constant variance init (0 = scale-aware default)");
    opt("--eps0", config.line_search.eps0, "GD initial step");
    opt("--shrink", config.line_search.shrink, "GD backtracking factor");
    opt("--max-halvings", config.line_search.max_halvings, "GD backtracking budget");
    opt("--grid-rows", grid_rows, "grid topology rows (0 = chain)");
    opt("--grid-cols", grid_cols, "grid topology cols (0 = chain)");
    opt("--snr-convention", snr_convention,
        "sigma in the SNR formula: total or per_component");
    cmd->add_option("--config", config_file,
                    "key = value file with any of the options above");
  }

  void resolve() {
    if (solver == "gd") {
      config.solver = SolverKind::GD;
    } else if (solver == "elbo") {
      config.solver = SolverKind::ELBO;
    } else {
      throw CLI::ValidationError("--solver", "must be 'gd' or 'elbo'");
    }
    if (snr_convention != "total" && snr_convention != "per_component") {
      throw CLI::ValidationError("--snr-convention",
                                 "must be 'total' or 'per_component'");
    }
    if ((grid_rows == 0) != (grid_cols == 0)) {
      throw CLI::ValidationError("--grid-rows/--grid-cols",
                                 "must be given together");
    }
    if (grid_rows > 0) config.topology = TopologySpec::grid(grid_rows, grid_cols);
  }

  SnrConvention convention() const {
    return snr_convention == "total" ? SnrConvention::Total
                                     : SnrConvention::PerComponent;
  }
};

json config_to_json(const VspConfig& c) {
  json j;
  j["solver"] = c.solver == SolverKind::GD ? "gd" : "elbo";
  j["t_out"] = c.t_out;
  j["t_in"] = c.t_in;
  j["alpha"] = c.mrf.alpha;
  j["beta"] = c.mrf.beta;
  j["rho"] = c.mrf.rho;
  j["vartheta"] = c.vartheta;
  j["k_sparsity"] = c.k_sparsity;
  j["gamma_a"] = c.gamma.a;
  j["gamma_b"] = c.gamma.b;
  j["mrf_sweeps"] = c.mrf_sweeps;
  j["pi_floor"] = c.pi_floor;
  j["init_mu"] = c.init_mu;
  j["sigma2"] = c.sigma2;
  j["eps0"] = c.line_search.eps0;
  j["shrink"] = c.line_search.shrink;
  j["max_halvings"] = c.line_search.max_halvings;
  if (c.topology.kind == TopologySpec::Kind::Grid) {
    j["topology"] = {{"rows", c.topology.rows}, {"cols", c.topology.cols}};
  } else {
    j["topology"] = "chain";
  }
  return j;
}

void write_json(const fs::path& path, const json& j) {
  io::atomic_write(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

ComplexVector as_vector(const ComplexMatrix& mat, const std::string& flag) {
  if (mat.cols() == 1) return mat.col(0);
  if (mat.rows() == 1) return mat.row(0).transpose();
  throw std::invalid_argument(flag + ": expected a vector, got " +
                              std::to_string(mat.rows()) + "x" +
                              std::to_string(mat.cols()));
}

int effective_jobs(int requested) {
  int jobs = requested;
  if (const char* cap = std::getenv("VSP_THREADS")) {
    const int limit = std::atoi(cap);
    if (limit >= 1) jobs = std::min(jobs, limit);
  }
  return std::max(1, jobs);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Reads a "key = value" config file into injectable arguments. Keys use the
// long option names without the leading dashes; '#' starts a comment.
std::vector<std::string> config_file_args(const std::string& path) {
  static const std::vector<std::string> kKeys = {
      "solver",     "t-out",     "t-in",       "alpha",        "beta",
      "rho",        "vartheta",  "k-sparsity", "gamma-a",      "gamma-b",
      "mrf-sweeps", "pi-floor",  "init-mu",    "eps0",         "shrink",
      "max-halvings", "grid-rows", "grid-cols", "snr-convention"};
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("--config: cannot open " + path);
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": unknown config key '" + key + "'");
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

// ---------------------------------------------------------------------------
// recover

struct RecoverArgs {
  std::string matrix_path;
  std::string measurements_path;
  std::string output_path;
  std::string truth_path;
  std::string manifest_path;
  std::string diagnostics_path;
  double sigma2 = 0.0;
  ConfigFlags flags;
};

int cmd_recover(RecoverArgs& args) {
  if (!args.manifest_path.empty()) {
    std::ifstream is(args.manifest_path);
    if (!is) {
      throw std::invalid_argument("--manifest: cannot open " + args.manifest_path);
    }
    const json manifest = json::parse(is);
    const fs::path dir = fs::path(args.manifest_path).parent_path();
    if (args.matrix_path.empty()) {
      args.matrix_path = (dir / manifest.at("files").at("matrix").get<std::string>());
    }
    if (args.measurements_path.empty()) {
      args.measurements_path =
          (dir / manifest.at("files").at("measurements").get<std::string>());
    }
    if (args.truth_path.empty() && manifest.at("files").contains("signal")) {
      args.truth_path = (dir / manifest.at("files").at("signal").get<std::string>());
    }
    if (args.sigma2 <= 0.0) args.sigma2 = manifest.at("sigma2_component").get<double>();
    if (args.flags.config.k_sparsity == 0) {
      args.flags.config.k_sparsity = manifest.at("k").get<int>();
    }
    if (manifest.contains("topology") && manifest["topology"].is_object()) {
      args.flags.config.topology =
          TopologySpec::grid(manifest["topology"]["rows"].get<Index>(),
                             manifest["topology"]["cols"].get<Index>());
    }
  }
  if (args.matrix_path.empty()) {
    throw std::invalid_argument("--matrix is required (or provide --manifest)");
  }
  if (args.measurements_path.empty()) {
    throw std::invalid_argument("--measurements is required (or provide --manifest)");
  }
  if (!(args.sigma2 > 0.0)) {
    throw std::invalid_argument("--sigma2 must be positive (or come from --manifest)");
  }

  const ComplexMatrix A = io::read_matrix_auto(args.matrix_path);
  const ComplexVector y = as_vector(io::read_matrix_auto(args.measurements_path),
                                    "--measurements");
  if (A.rows() != y.size()) {
    throw std::invalid_argument(
        "--matrix/--measurements dimension mismatch: A is " +
        std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + ", y has " +
        std::to_string(y.size()) + " entries");
  }

  VspConfig config = args.flags.config;
  config.sigma2 = args.sigma2;
  const VspResult result = run_vsp(y, A, config);
  io::write_matrix_auto(args.output_path, result.x_hat);

  json diag;
  diag["chi_per_round"] = result.diagnostics.chi_per_round;
  diag["kappa_per_round"] = result.diagnostics.kappa_per_round;
  diag["mrf_degeneracies"] = result.diagnostics.mrf_degeneracies;
  diag["degenerate_kappa"] = result.diagnostics.degenerate_kappa;

  if (!args.truth_path.empty()) {
    const ComplexVector truth =
        as_vector(io::read_matrix_auto(args.truth_path), "--truth");
    if (truth.size() != result.x_hat.size()) {
      throw std::invalid_argument("--truth: length mismatch with the estimate");
    }
    const double err = nmse(result.x_hat, truth);
    diag["nmse"] = err;
    diag["nmse_db"] = to_db(err);
    std::cout << "nmse " << io::format_double(err) << "\n";
    std::cout << "nmse_db " << io::format_double(to_db(err)) << "\n";
  }
  if (!args.diagnostics_path.empty()) write_json(args.diagnostics_path, diag);
  std::cout << "wrote " << args.output_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

std::optional<ExperimentSpec> preset_spec(const std::string& name) {
  ExperimentSpec spec;
  spec.id = name;
  spec.trials = 500;
  spec.base_seed = 1;
  spec.config.t_out = 2;
  spec.config.t_in = 30;
  const std::vector<double> snr_sweep = {5, 10, 15, 20, 25, 30};
  if (name == "fig5a") {
    spec.n = 200; spec.k = 30; spec.l = 1;
    spec.matrix_kind = MatrixKind::Scg;
    spec.m_grid = {75};
    spec.snr_grid = snr_sweep;
  } else if (name == "fig5b") {
    spec.n = 200; spec.k = 30; spec.l = 1;
    spec.matrix_kind = MatrixKind::Scg;
    spec.m_grid = {50, 60, 70, 80, 90, 100, 110, 120};
    spec.snr_grid = {20};
  } else if (name == "fig6a") {
    spec.n = 100; spec.k = 20; spec.l = 2;
    spec.matrix_kind = MatrixKind::CroppedHermitian;
    spec.m_grid = {60};
    spec.snr_grid = snr_sweep;
  } else if (name == "fig6b") {
    spec.n = 100; spec.k = 20; spec.l = 2;
    spec.matrix_kind = MatrixKind::CroppedHermitian;
    spec.m_grid = {40, 50, 60, 70, 80, 90};
    spec.snr_grid = {20};
  } else if (name == "fig7a") {
    spec.n = 300; spec.k = 50; spec.l = 3;
    spec.matrix_kind = MatrixKind::ConcatExpGauss;
    spec.m_grid = {120};
    spec.snr_grid = snr_sweep;
  } else if (name == "fig7b") {
    spec.n = 300; spec.k = 50; spec.l = 3;
    spec.matrix_kind = MatrixKind::ConcatExpGauss;
    spec.m_grid = {80, 100, 120, 140, 160};
    spec.snr_grid = {20};
  } else {
    return std::nullopt;
  }
  return spec;
}

std::vector<std::string> preset_names() {
  return {"fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b"};
}

template <typename T>
std::vector<T> scalar_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

ExperimentSpec spec_from_json(const fs::path& path, const ConfigFlags& flags) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("--spec: cannot open " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("--spec: " + std::string(e.what()));
  }

  ExperimentSpec spec;
  spec.config = flags.config;
  spec.snr_convention = flags.convention();
  try {
    spec.id = j.value("id", path.stem().string());
    spec.n = j.at("n").get<Index>();
    spec.k = j.at("k").get<Index>();
    spec.l = j.at("l").get<Index>();
    spec.m_grid = scalar_or_list<Index>(j.at("m"));
    spec.snr_grid = scalar_or_list<double>(j.at("snr_db"));
    spec.matrix_kind = matrix_kind_from_string(j.value("matrix_kind", "scg"));
    spec.trials = j.value("trials", 1);
    spec.base_seed = j.value("seed", std::uint64_t{0});
    if (j.contains("snr_convention")) {
      const auto conv = j["snr_convention"].get<std::string>();
      if (conv == "total") {
        spec.snr_convention = SnrConvention::Total;
      } else if (conv == "per_component") {
        spec.snr_convention = SnrConvention::PerComponent;
      } else {
        throw std::invalid_argument("snr_convention must be total or per_component");
      }
    }
    if (j.contains("config")) {
      const json& c = j["config"];
      VspConfig& cfg = spec.config;
      if (c.contains("solver")) {
        const auto s = c["solver"].get<std::string>();
        if (s == "gd") {
          cfg.solver = SolverKind::GD;
        } else if (s == "elbo") {
          cfg.solver = SolverKind::ELBO;
        } else {
          throw std::invalid_argument("config.solver must be gd or elbo");
        }
      }
      cfg.t_out = c.value("t_out", cfg.t_out);
      cfg.t_in = c.value("t_in", cfg.t_in);
      cfg.mrf.alpha = c.value("alpha", cfg.mrf.alpha);
      cfg.mrf.beta = c.value("beta", cfg.mrf.beta);
      cfg.mrf.rho = c.value("rho", cfg.mrf.rho);
      cfg.vartheta = c.value("vartheta", cfg.vartheta);
      cfg.gamma.a = c.value("gamma_a", cfg.gamma.a);
      cfg.gamma.b = c.value("gamma_b", cfg.gamma.b);
      cfg.mrf_sweeps = c.value("mrf_sweeps", cfg.mrf_sweeps);
      cfg.pi_floor = c.value("pi_floor", cfg.pi_floor);
      cfg.init_mu = c.value("init_mu", cfg.init_mu);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("--spec: " + std::string(e.what()));
  }
  return spec;
}

struct BenchArgs {
  std::string spec_path;
  std::string preset;
  std::string out_dir;
  int jobs = 1;
  int trials_override = 0;
  std::int64_t seed_override = -1;
  ConfigFlags flags;
};

int cmd_bench(const BenchArgs& args) {
  ExperimentSpec spec;
  if (!args.preset.empty()) {
    auto maybe = preset_spec(args.preset);
    if (!maybe) {
      std::string names;
      for (const auto& p : preset_names()) names += (names.empty() ? "" : ", ") + p;
      throw std::invalid_argument("--preset: unknown preset '" + args.preset +
                                  "' (valid: " + names + ")");
    }
    spec = *maybe;
    spec.snr_convention = args.flags.convention();
  } else if (!args.spec_path.empty()) {
    spec = spec_from_json(args.spec_path, args.flags);
  } else {
    throw std::invalid_argument("--spec or --preset is required");
  }
  if (args.trials_override > 0) spec.trials = args.trials_override;
  if (args.seed_override >= 0) {
    spec.base_seed = static_cast<std::uint64_t>(args.seed_override);
  }
  spec.validate();

  const int jobs = effective_jobs(args.jobs);
  const ExperimentResults results = run_experiment(spec, jobs);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  const std::string trials_csv = (dir / (spec.id + "_trials.csv")).string();
  const std::string aggregate_csv = (dir / (spec.id + "_aggregate.csv")).string();
  const std::string plot_script = (dir / (spec.id + "_plot.gp")).string();
  write_trials_csv(trials_csv, spec, results.trials);
  write_aggregate_csv(aggregate_csv, spec, results.aggregate);
  write_plot_script(plot_script, spec, spec.id + "_aggregate.csv");

  json meta;
  meta["id"] = spec.id;
  meta["n"] = spec.n;
  meta["m"] = spec.m_grid;
  meta["k"] = spec.k;
  meta["l"] = spec.l;
  meta["snr_db"] = spec.snr_grid;
  meta["matrix_kind"] = to_string(spec.matrix_kind);
  meta["trials"] = spec.trials;
  meta["seed"] = spec.base_seed;
  meta["snr_convention"] =
      spec.snr_convention == SnrConvention::Total ? "total" : "per_component";
  meta["config"] = config_to_json(spec.config);
  write_json(dir / (spec.id + "_spec.json"), meta);

  std::cout << "grid_point algorithm mean_nmse_db trials failures\n";
  for (const auto& row : results.aggregate) {
    std::cout << "M=" << row.m << ",snr=" << io::format_double(row.snr_db) << ' '
              << row.algorithm << ' ' << io::format_double(row.mean_nmse_db) << ' '
              << row.trial_count << ' ' << row.failure_count << "\n";
  }
  std::cout << "wrote " << trials_csv << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  Index n = 0, m = 0, k = 0, l = 1;
  std::string kind = "scg";
  double snr_db = 20.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string image_path;
  bool no_recovery = false;
  ConfigFlags flags;
};

int cmd_gen(const GenArgs& args) {
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  Rng rng(args.seed);

  ComplexVector x;
  std::vector<Index> support;
  VspConfig config = args.flags.config;
  json manifest;

  if (!args.image_path.empty()) {
    const RealMatrix img = io::read_pgm(args.image_path);
    const Index rows = img.rows(), cols = img.cols();
    x = ComplexVector::Zero(rows * cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) x[r * cols + c] = Complex(img(r, c), 0.0);
    }
    for (Index i = 0; i < x.size(); ++i) {
      if (x[i] != Complex(0.0, 0.0)) support.push_back(i);
    }
    config.topology = TopologySpec::grid(rows, cols);
    manifest["image"] = args.image_path;
    manifest["topology"] = {{"rows", rows}, {"cols", cols}};
  } else {
    if (args.n < 1 || args.m < 1 || args.k < 1) {
      throw std::invalid_argument("--n, --m and --k are required without --image");
    }
    std::tie(x, support) = gen_block_sparse_signal(args.n, args.k, args.l, rng);
  }
  const Index n = x.size();
  const Index m = args.m >= 1 ? args.m : n / 2;
  require(m <= n, "--m must be <= the signal length");

  const MatrixKind kind = matrix_kind_from_string(args.kind);
  const ComplexMatrix A = gen_matrix(kind, m, n, rng);
  const double sigma_total = sigma_for_snr(A, x, args.snr_db);
  const double sigma2_component =
      args.flags.convention() == SnrConvention::Total
          ? sigma_total * sigma_total / static_cast<double>(m)
          : sigma_total * sigma_total;
  ComplexVector w(m);
  for (Index i = 0; i < m; ++i) {
    w[i] = std::sqrt(sigma2_component) * sample_scg(rng);
  }
  const ComplexVector y = A * x + w;

  io::write_vspm(dir / "A.vspm", A);
  io::write_vspm(dir / "x.vspm", x);
  io::write_vspm(dir / "y.vspm", y);
  io::write_vspm(dir / "w.vspm", w);
  io::atomic_write(dir / "support.csv", [&](std::ostream& os) {
    for (Index idx : support) os << idx << '\n';
  });

  manifest["n"] = n;
  manifest["m"] = m;
  manifest["k"] = static_cast<Index>(support.size());
  manifest["l"] = args.l;
  manifest["kind"] = args.kind;
  manifest["seed"] = args.seed;
  manifest["snr_db"] = args.snr_db;
  manifest["snr_convention"] =
      args.flags.convention() == SnrConvention::Total ? "total" : "per_component";
  manifest["sigma_total"] = sigma_total;
  manifest["sigma2_component"] = sigma2_component;
  manifest["files"] = {{"matrix", "A.vspm"},
                       {"signal", "x.vspm"},
                       {"measurements", "y.vspm"},
                       {"noise", "w.vspm"},
                       {"support", "support.csv"}};

  config.sigma2 = sigma2_component;
  if (config.k_sparsity == 0) config.k_sparsity = static_cast<int>(support.size());
  manifest["config"] = config_to_json(config);

  if (!args.no_recovery) {
    const VspResult result = run_vsp(y, A, config);
    manifest["recovered_nmse"] = nmse(result.x_hat, x);
    manifest["recovered_nmse_db"] = to_db(nmse(result.x_hat, x));
  }
  write_json(dir / "manifest.json", manifest);
  std::cout << "wrote fixture to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variance state propagation for block-sparse recovery"};
  app.require_subcommand(1);

  RecoverArgs recover;
  CLI::App* rec = app.add_subcommand("recover", "recover a signal from A and y");
  rec->add_option("--matrix", recover.matrix_path, "measurement matrix (.vspm or .csv)");
  rec->add_option("--measurements", recover.measurements_path, "measurement vector");
  rec->add_option("--output", recover.output_path, "estimate output path")->required();
  rec->add_option("--truth", recover.truth_path, "ground-truth signal (prints NMSE)");
  rec->add_option("--manifest", recover.manifest_path,
                  "fixture manifest supplying inputs and sigma2");
  rec->add_option("--diagnostics", recover.diagnostics_path,
                  "write per-round diagnostics JSON here");
  rec->add_option("--sigma2", recover.sigma2, "per-component noise variance");
  recover.flags.attach(rec);

  BenchArgs bench;
  CLI::App* ben = app.add_subcommand("bench", "run a Monte Carlo benchmark sweep");
  ben->add_option("--spec", bench.spec_path, "experiment spec JSON");
  ben->add_option("--preset", bench.preset,
                  "built-in spec: fig5a fig5b fig6a fig6b fig7a fig7b");
  ben->add_option("--out-dir", bench.out_dir, "output directory")->required();
  ben->add_option("--jobs", bench.jobs, "worker pool width (results invariant)")
      ->capture_default_str();
  ben->add_option("--trials", bench.trials_override, "override trial count");
  ben->add_option("--seed", bench.seed_override, "override base seed");
  bench.flags.attach(ben);

  GenArgs gen;
  CLI::App* g = app.add_subcommand("gen", "generate a reproducible fixture");
  g->add_option("--n", gen.n, "signal length");
  g->add_option("--m", gen.m, "measurement count");
  g->add_option("--k", gen.k, "nonzero count");
  g->add_option("--l", gen.l, "block count")->capture_default_str();
  g->add_option("--kind", gen.kind, "matrix kind")->capture_default_str();
  g->add_option("--snr", gen.snr_db, "SNR in dB")->capture_default_str();
  g->add_option("--seed", gen.seed, "RNG seed")->required();
  g->add_option("--out-dir", gen.out_dir, "output directory")->required();
  g->add_option("--image", gen.image_path, "PGM image as the 2-D test signal");
  g->add_flag("--no-recovery", gen.no_recovery,
              "skip the reference recovery in the manifest");
  gen.flags.attach(g);

  // Assemble the argument list, splicing config-file values in right after
  // the subcommand so explicit flags (parsed later, TakeLast) override them.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string config_path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--config") config_path = args[i + 1];
    }
    for (const auto& arg : args) {
      if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }
    if (!config_path.empty() && !args.empty() && args[0][0] != '-') {
      const std::vector<std::string> injected = config_file_args(config_path);
      args.insert(args.begin() + 1, injected.begin(), injected.end());
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (rec->parsed()) {
      recover.flags.resolve();
      return cmd_recover(recover);
    }
    if (ben->parsed()) {
      bench.flags.resolve();
      return cmd_bench(bench);
    }
    if (g->parsed()) {
      gen.flags.resolve();
      return cmd_gen(gen);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
