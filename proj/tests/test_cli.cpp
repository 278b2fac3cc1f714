// End-to-end checks of the vsp binary: exit codes, fixture round trips,
// bench output determinism. The binary path comes from VSP_CLI.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "vsp/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("VSP_CLI");
  REQUIRE_MESSAGE(env != nullptr, "VSP_CLI must point at the vsp binary");
  return env;
}

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_file =
      (fs::temp_directory_path() / ("vsp_cli_out_" + std::to_string(::getpid())))
          .string();
  const std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream is(out_file);
  std::stringstream ss;
  ss << is.rdbuf();
  result.output = ss.str();
  fs::remove(out_file);
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("vsp_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Strips the runtime_ms column (the one wall-clock field) from a trials CSV.
std::string without_runtime(const std::string& csv) {
  std::stringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    int col = 0;
    std::string kept;
    while (std::getline(row, cell, ',')) {
      if (col != 12) kept += (kept.empty() ? "" : ",") + cell;
      ++col;
    }
    out += kept + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("usage errors exit 2 and name the problem") {
  CHECK(run_cli("recover --output /dev/null").exit_code == 2);
  const RunResult missing = run_cli("recover --output /dev/null");
  CHECK(missing.output.find("--matrix") != std::string::npos);

  const RunResult no_out = run_cli("recover --matrix a.vspm");
  CHECK(no_out.exit_code == 2);
  CHECK(no_out.output.find("--output") != std::string::npos);

  const RunResult bad_solver =
      run_cli("recover --matrix a --measurements b --output c --sigma2 1 --solver qp");
  CHECK(bad_solver.exit_code == 2);
  CHECK(bad_solver.output.find("--solver") != std::string::npos);

  const RunResult no_sub = run_cli("");
  CHECK(no_sub.exit_code == 2);
}

TEST_CASE("invalid matrix kind lists the valid kinds") {
  TempDir dir;
  const RunResult bad = run_cli("gen --n 16 --m 8 --k 4 --kind hadamard --seed 1 --out-dir " +
                                dir.path.string());
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("scg") != std::string::npos);
  CHECK(bad.output.find("cropped_hermitian") != std::string::npos);
  CHECK(bad.output.find("concat_exp_gauss") != std::string::npos);
  CHECK(bad.output.find("real_normal") != std::string::npos);
}

TEST_CASE("gen fixtures are reproducible byte for byte") {
  TempDir dir;
  const std::string args = "gen --n 32 --m 16 --k 6 --l 2 --snr 20 --seed 7 --out-dir ";
  CHECK(run_cli(args + (dir.path / "a").string()).exit_code == 0);
  CHECK(run_cli(args + (dir.path / "b").string()).exit_code == 0);
  for (const char* name : {"A.vspm", "x.vspm", "y.vspm", "w.vspm", "support.csv",
                           "manifest.json"}) {
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
  }
}

TEST_CASE("gen manifest is consistent with the written fixture") {
  TempDir dir;
  REQUIRE(run_cli("gen --n 40 --m 20 --k 9 --l 3 --snr 15 --seed 3 --out-dir " +
                  dir.path.string())
              .exit_code == 0);
  const json manifest = json::parse(slurp(dir.path / "manifest.json"));

  // K in the manifest equals the nonzero count of the written signal.
  const vsp::ComplexMatrix x = vsp::io::read_vspm(dir.path / "x.vspm");
  int nonzeros = 0;
  for (vsp::Index i = 0; i < x.rows(); ++i) {
    if (x(i, 0) != vsp::Complex(0.0, 0.0)) ++nonzeros;
  }
  CHECK(manifest.at("k").get<int>() == nonzeros);
  CHECK(manifest.at("k").get<int>() == 9);

  // y - Ax - w is exactly zero by construction (same product kernel the
  // generator used: matrix times vector).
  const vsp::ComplexMatrix A = vsp::io::read_vspm(dir.path / "A.vspm");
  const vsp::ComplexVector xv = vsp::io::read_vspm(dir.path / "x.vspm").col(0);
  const vsp::ComplexVector y = vsp::io::read_vspm(dir.path / "y.vspm").col(0);
  const vsp::ComplexVector w = vsp::io::read_vspm(dir.path / "w.vspm").col(0);
  const vsp::ComplexVector residual = y - (A * xv + w);
  CHECK(residual.norm() == 0.0);
}

TEST_CASE("recover reproduces the manifest NMSE bit for bit") {
  TempDir dir;
  REQUIRE(run_cli("gen --n 48 --m 24 --k 8 --l 2 --snr 25 --seed 7 --out-dir " +
                  dir.path.string())
              .exit_code == 0);
  const json manifest = json::parse(slurp(dir.path / "manifest.json"));
  const double recorded = manifest.at("recovered_nmse").get<double>();

  const RunResult rec =
      run_cli("recover --manifest " + (dir.path / "manifest.json").string() +
              " --output " + (dir.path / "xhat.vspm").string());
  REQUIRE(rec.exit_code == 0);
  const auto pos = rec.output.find("nmse ");
  REQUIRE(pos != std::string::npos);
  const double reported = std::stod(rec.output.substr(pos + 5));
  CHECK(reported == recorded);
}

TEST_CASE("recover honors truth and diagnostics flags") {
  TempDir dir;
  REQUIRE(run_cli("gen --n 24 --m 12 --k 4 --snr 30 --seed 11 --out-dir " +
                  dir.path.string())
              .exit_code == 0);
  const RunResult rec = run_cli(
      "recover --matrix " + (dir.path / "A.vspm").string() + " --measurements " +
      (dir.path / "y.vspm").string() + " --truth " + (dir.path / "x.vspm").string() +
      " --sigma2 " +
      std::to_string(
          json::parse(slurp(dir.path / "manifest.json"))["sigma2_component"]
              .get<double>()) +
      " --k-sparsity 4 --output " + (dir.path / "xhat.csv").string() +
      " --diagnostics " + (dir.path / "diag.json").string());
  REQUIRE(rec.exit_code == 0);
  CHECK(rec.output.find("nmse") != std::string::npos);
  const json diag = json::parse(slurp(dir.path / "diag.json"));
  CHECK(diag.at("chi_per_round").size() == 2);
  CHECK(diag.at("kappa_per_round").size() == 1);
  CHECK(diag.contains("nmse"));
  // The CSV output path produces a readable estimate of the right length.
  const vsp::ComplexMatrix xhat = vsp::io::read_matrix_csv(dir.path / "xhat.csv");
  CHECK(xhat.rows() == 24);
}

TEST_CASE("recover rejects dimension mismatches naming both flags") {
  TempDir dir;
  REQUIRE(run_cli("gen --n 24 --m 12 --k 4 --snr 30 --seed 2 --out-dir " +
                  dir.path.string())
              .exit_code == 0);
  const RunResult bad = run_cli(
      "recover --matrix " + (dir.path / "A.vspm").string() + " --measurements " +
      (dir.path / "x.vspm").string() +  // signal instead of measurements
      " --sigma2 0.1 --output " + (dir.path / "xhat.vspm").string());
  CHECK(bad.exit_code == 2);
  CHECK(bad.output.find("dimension mismatch") != std::string::npos);
}

TEST_CASE("bench spec runs produce the full output set") {
  TempDir dir;
  const fs::path spec = dir.path / "spec.json";
  std::ofstream(spec) << R"({"id":"mini","n":32,"m":[16],"k":6,"l":2,
      "snr_db":[10,20],"matrix_kind":"scg","trials":3,"seed":5,
      "config":{"t_out":2,"t_in":8}})";
  const RunResult run =
      run_cli("bench --spec " + spec.string() + " --out-dir " + dir.path.string());
  REQUIRE(run.exit_code == 0);
  CHECK(fs::exists(dir.path / "mini_trials.csv"));
  CHECK(fs::exists(dir.path / "mini_aggregate.csv"));
  CHECK(fs::exists(dir.path / "mini_plot.gp"));
  CHECK(fs::exists(dir.path / "mini_spec.json"));

  const std::string trials = slurp(dir.path / "mini_trials.csv");
  CHECK(trials.rfind("experiment_id,matrix_kind,N,M,K,L,snr_db,trial,seed,"
                     "algorithm,nmse,nmse_db,runtime_ms,status\n", 0) == 0);
  // 2 grid points x 3 trials x 2 algorithms + header
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 13);

  const std::string agg = slurp(dir.path / "mini_aggregate.csv");
  CHECK(agg.rfind("experiment_id,matrix_kind,N,M,K,L,snr_db,algorithm,"
                  "mean_nmse_db,trial_count,failure_count\n", 0) == 0);
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 5);
}

TEST_CASE("bench results are invariant to the worker count") {
  TempDir dir;
  const fs::path spec = dir.path / "spec.json";
  std::ofstream(spec) << R"({"id":"par","n":32,"m":[16],"k":6,"l":2,
      "snr_db":[15],"matrix_kind":"scg","trials":4,"seed":9,
      "config":{"t_out":2,"t_in":8}})";
  REQUIRE(run_cli("bench --spec " + spec.string() + " --jobs 1 --out-dir " +
                  (dir.path / "j1").string())
              .exit_code == 0);
  REQUIRE(run_cli("bench --spec " + spec.string() + " --jobs 8 --out-dir " +
                  (dir.path / "j8").string())
              .exit_code == 0);
  CHECK(without_runtime(slurp(dir.path / "j1" / "par_trials.csv")) ==
        without_runtime(slurp(dir.path / "j8" / "par_trials.csv")));
  CHECK(slurp(dir.path / "j1" / "par_aggregate.csv") ==
        slurp(dir.path / "j8" / "par_aggregate.csv"));
}

TEST_CASE("bench rejects a bad matrix kind listing valid ones") {
  TempDir dir;
  const fs::path spec = dir.path / "spec.json";
  std::ofstream(spec) << R"({"id":"bad","n":16,"m":[8],"k":4,"l":1,
      "snr_db":[10],"matrix_kind":"walsh","trials":1})";
  const RunResult run =
      run_cli("bench --spec " + spec.string() + " --out-dir " + dir.path.string());
  CHECK(run.exit_code == 2);
  CHECK(run.output.find("valid:") != std::string::npos);
  CHECK(run.output.find("concat_exp") != std::string::npos);
}

TEST_CASE("fig6a preset enumerates six SNR points") {
  TempDir dir;
  // Trials cut to 1: the preset's grid shape is what is under test.
  const RunResult run = run_cli("bench --preset fig6a --trials 1 --out-dir " +
                                dir.path.string());
  REQUIRE(run.exit_code == 0);
  const std::string agg = slurp(dir.path / "fig6a_aggregate.csv");
  // header + 6 SNR points x 2 algorithms
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 13);
  CHECK(agg.find("cropped_hermitian") != std::string::npos);
}

TEST_CASE("config file layers under flags") {
  TempDir dir;
  const fs::path cfg = dir.path / "vsp.cfg";
  std::ofstream(cfg) << "t-in=5\nalpha=0.25\n";
  REQUIRE(run_cli("gen --n 24 --m 12 --k 4 --snr 20 --seed 4 --out-dir " +
                  dir.path.string() + " --config " + cfg.string() +
                  " --alpha 0.45")
              .exit_code == 0);
  const json manifest = json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest["config"]["t_in"].get<int>() == 5);        // from file
  CHECK(manifest["config"]["alpha"].get<double>() == 0.45);  // flag wins
}

TEST_CASE("pgm images become grid-topology fixtures") {
  TempDir dir;
  const fs::path img = dir.path / "img.pgm";
  std::ofstream(img) << "P2\n4 3\n255\n"
                     << "0 255 255 0\n0 255 255 0\n0 0 0 0\n";
  REQUIRE(run_cli("gen --image " + img.string() + " --m 8 --seed 6 --snr 25 --out-dir " +
                  dir.path.string())
              .exit_code == 0);
  const json manifest = json::parse(slurp(dir.path / "manifest.json"));
  CHECK(manifest["n"].get<int>() == 12);
  CHECK(manifest["k"].get<int>() == 4);
  CHECK(manifest["topology"]["rows"].get<int>() == 3);
  CHECK(manifest["topology"]["cols"].get<int>() == 4);
  CHECK(manifest.contains("recovered_nmse"));
}
