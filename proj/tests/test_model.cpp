#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "vsp/model.hpp"

#include <cmath>
#include <numbers>

using namespace vsp;

TEST_CASE("gamma_pdf basic values") {
  CHECK(gamma_pdf(-1.0, {2.0, 3.0}) == 0.0);
  CHECK(gamma_pdf(0.0, {2.0, 3.0}) == 0.0);
  CHECK(gamma_pdf(1.0, {1.0, 1.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("gamma_pdf mean via quadrature") {
  const GammaParams p{3.0, 2.0};
  const double mean = oracles::integrate(
      [&](double v) { return v * gamma_pdf(v, p); }, 0.0, 60.0);
  CHECK(mean == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("gamma_pdf integrates to one") {
  for (double a : {0.5, 1.0, 3.0}) {
    for (double b : {0.5, 1.0, 3.0}) {
      const GammaParams p{a, b};
      // Integrable singularity at v = 0 for a < 1; start epsilon in and
      // bound the truncated head mass by the a-power envelope.
      const double eps = 1e-12;
      const double head = std::pow(b, a) * std::pow(eps, a) / (a * std::tgamma(a));
      const double mass = oracles::integrate(
          [&](double v) { return gamma_pdf(v, p); }, eps, 220.0 / b);
      CHECK(mass + head == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("gamma_pdf survives noninformative shapes") {
  const GammaParams tiny{1e-10, 1e-10};
  const double val = gamma_pdf(1.0, tiny);
  CHECK(std::isfinite(val));
  CHECK(val > 0.0);
}

TEST_CASE("sample_block_prior edge cases and moments") {
  Rng rng(12345);
  const GammaParams p{2.0, 1.0};

  const RealVector zeros = sample_block_prior(4, p, 0.0, rng);
  CHECK(zeros.isZero(0.0));

  CHECK_THROWS_AS(sample_block_prior(4, p, 1.5, rng), std::invalid_argument);

  const Index n = 100000;
  const RealVector mixed = sample_block_prior(n, p, 0.3, rng);
  CHECK((mixed.array() >= 0.0).all());
  const auto nonzero = static_cast<double>((mixed.array() > 0.0).count());
  CHECK(nonzero / n == doctest::Approx(0.3).epsilon(0.034));

  // Exact-zero count vs Binomial(n, 1 - rho), 4 sigma slack.
  const double expected_zero = n * 0.7;
  const double sd = std::sqrt(n * 0.3 * 0.7);
  CHECK(std::abs((n - nonzero) - expected_zero) < 4.0 * sd);

  const RealVector dense = sample_block_prior(n, p, 1.0, rng);
  CHECK(dense.mean() == doctest::Approx(2.0).epsilon(0.011));
}

TEST_CASE("cscg_loglik closed forms") {
  const Index m = 5;
  const ComplexVector zero = ComplexVector::Zero(m);
  const ComplexMatrix eye = ComplexMatrix::Identity(m, m);
  CHECK(cscg_loglik(zero, eye) ==
        doctest::Approx(-m * std::log(std::numbers::pi)).epsilon(1e-12));

  ComplexVector y1(1);
  y1 << Complex(1.0, 0.0);
  ComplexMatrix s1(1, 1);
  s1 << Complex(1.0, 0.0);
  CHECK(cscg_loglik(y1, s1) ==
        doctest::Approx(-1.0 - std::log(std::numbers::pi)).epsilon(1e-12));

  std::mt19937_64 rng(7);
  const ComplexVector y = oracles::random_vector(3, rng);
  const ComplexMatrix two_eye = 2.0 * ComplexMatrix::Identity(3, 3);
  const double expected =
      -y.squaredNorm() / 2.0 - 3.0 * std::log(2.0 * std::numbers::pi);
  CHECK(cscg_loglik(y, two_eye) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cscg_loglik rejects indefinite covariance") {
  ComplexVector y(2);
  y << Complex(1.0, 0.0), Complex(0.0, 1.0);
  ComplexMatrix bad(2, 2);
  bad << Complex(1.0, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-1.0, 0.0);
  CHECK_THROWS_AS(cscg_loglik(y, bad), std::runtime_error);
}

TEST_CASE("cscg_loglik unitary invariance") {
  std::mt19937_64 rng(42);
  const Index m = 6;
  const ComplexVector y = oracles::random_vector(m, rng);
  ComplexMatrix g = oracles::random_matrix(m, m, rng);
  ComplexMatrix cov = g * g.adjoint() + 0.5 * ComplexMatrix::Identity(m, m);

  const ComplexMatrix u =
      Eigen::HouseholderQR<ComplexMatrix>(oracles::random_matrix(m, m, rng))
          .householderQ();
  const double base = cscg_loglik(y, cov);
  const double rotated = cscg_loglik(u * y, u * cov * u.adjoint());
  CHECK(rotated == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("sample_scg has unit variance") {
  Rng rng(99);
  const Index n = 200000;
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += std::norm(sample_scg(rng));
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));
}
