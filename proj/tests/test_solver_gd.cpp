#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vsp/posterior.hpp"
#include "vsp/solver_gd.hpp"

#include <cmath>

using namespace vsp;

namespace {
const LineSearchParams kDefaultLs{};
}

TEST_CASE("stationary input is a fixed point") {
  const ComplexMatrix A = ComplexMatrix::Zero(2, 3);
  const ComplexVector y = ComplexVector::Zero(2);
  const RealVector mu = RealVector::Constant(3, 1.5);
  const RealVector out = gd_solve(A, y, mu, 5, 1.0, kDefaultLs);
  CHECK(out == mu);
}

TEST_CASE("accepted steps never increase chi") {
  std::mt19937_64 rng(2718);
  for (int rep = 0; rep < 10; ++rep) {
    const Index m = 4, n = 8;
    const ComplexMatrix A = oracles::random_matrix(m, n, rng);
    const ComplexVector y = oracles::random_vector(m, rng);
    const RealVector mu = oracles::random_variances(n, rng);

    GdTrace trace;
    gd_solve(A, y, mu, 25, 0.5, kDefaultLs, &trace);
    double prev = trace.chi_initial;
    for (const auto& round : trace.rounds) {
      CHECK(round.chi_after <= prev);
      prev = round.chi_after;
    }
  }
}

TEST_CASE("accepted rounds move along the negative gradient") {
  std::mt19937_64 rng(99);
  const Index m = 3, n = 6;
  const ComplexMatrix A = oracles::random_matrix(m, n, rng);
  const ComplexVector y = oracles::random_vector(m, rng);
  RealVector mu = apply_variance_floor(oracles::random_variances(n, rng));

  for (int t = 0; t < 5; ++t) {
    const RealVector grad = chi_gradient(A, y, mu, 0.5);
    GdTrace trace;
    const RealVector next = gd_solve(A, y, mu, 1, 0.5, kDefaultLs, &trace);
    REQUIRE(trace.rounds.size() == 1);
    if (trace.rounds[0].accepted) {
      const RealVector raw = mu - trace.rounds[0].epsilon * grad;
      // Before clamping the step is exactly -eps * grad.
      const RealVector reconstructed = raw.cwiseMax(variance_floor(mu));
      CHECK((next - reconstructed).lpNorm<Eigen::Infinity>() < 1e-12);
    }
    mu = next;
  }
}

TEST_CASE("output stays at or above the positive floor") {
  std::mt19937_64 rng(11);
  const Index m = 4, n = 8;
  const ComplexMatrix A = oracles::random_matrix(m, n, rng);
  const ComplexVector y = oracles::random_vector(m, rng);
  const RealVector mu = RealVector::Zero(n);  // all-zero start gets floored
  const RealVector out = gd_solve(A, y, mu, 10, 1.0, kDefaultLs);
  CHECK((out.array() > 0.0).all());
}

TEST_CASE("two-coordinate instance reaches the grid-search optimum") {
  std::mt19937_64 rng(31415);
  const Index m = 1, n = 2;
  const ComplexMatrix A = oracles::random_matrix(m, n, rng);
  const ComplexVector y = oracles::random_vector(m, rng);
  const double sigma2 = 0.25;

  // Dense log-spaced grid over [0.01, 10]^2.
  const int steps = 160;
  double best = std::numeric_limits<double>::infinity();
  RealVector v(2);
  for (int i = 0; i < steps; ++i) {
    v[0] = 0.01 * std::pow(1000.0, i / (steps - 1.0));
    for (int j = 0; j < steps; ++j) {
      v[1] = 0.01 * std::pow(1000.0, j / (steps - 1.0));
      best = std::min(best, chi(A, y, v, sigma2));
    }
  }

  RealVector mu = RealVector::Constant(2, 1.0);
  const RealVector out = gd_solve(A, y, mu, 500, sigma2, kDefaultLs);
  CHECK(chi(A, y, out, sigma2) <= best + 1e-3);
}

TEST_CASE("rounds with no acceptable step are flagged no-ops") {
  // eps0 tiny and max_halvings 1 cannot fail on a smooth objective, so force
  // failure with a huge step and no room to shrink.
  std::mt19937_64 rng(5);
  const Index m = 2, n = 4;
  const ComplexMatrix A = oracles::random_matrix(m, n, rng);
  const ComplexVector y = 10.0 * oracles::random_vector(m, rng);
  const RealVector mu = RealVector::Constant(n, 1.0);

  LineSearchParams harsh;
  harsh.eps0 = 1e9;
  harsh.shrink = 0.999999;
  harsh.max_halvings = 1;
  GdTrace trace;
  const RealVector out = gd_solve(A, y, mu, 3, 0.01, harsh, &trace);
  if (trace.noop_rounds > 0) {
    CHECK(out == apply_variance_floor(mu));  // state untouched by no-op rounds
  }
  CHECK(trace.rounds.size() == 3);
}

TEST_CASE("relative-chi early exit trims rounds when enabled") {
  std::mt19937_64 rng(64);
  const Index m = 3, n = 6;
  const ComplexMatrix A = oracles::random_matrix(m, n, rng);
  const ComplexVector y = oracles::random_vector(m, rng);
  const RealVector mu = oracles::random_variances(n, rng);

  GdTrace full, trimmed;
  gd_solve(A, y, mu, 400, 0.5, kDefaultLs, &full);
  gd_solve(A, y, mu, 400, 0.5, kDefaultLs, &trimmed, 1e-10);
  CHECK(full.rounds.size() == 400);
  CHECK(trimmed.rounds.size() <= full.rounds.size());
}

TEST_CASE("input validation") {
  const ComplexMatrix A = ComplexMatrix::Zero(2, 3);
  const ComplexVector y = ComplexVector::Zero(2);
  RealVector negative(3);
  negative << 1.0, -0.5, 2.0;
  CHECK_THROWS_AS(gd_solve(A, y, negative, 1, 1.0, kDefaultLs), std::invalid_argument);
  CHECK_THROWS_AS(gd_solve(A, y, RealVector::Ones(3), 0, 1.0, kDefaultLs),
                  std::invalid_argument);
}
