#include <doctest.h>

#include "oracles.hpp"
#include "tvdeblur/harness.hpp"
#include "tvdeblur/tv.hpp"

using namespace tvdeblur;

TEST_CASE("diffusion coefficients") {
  SUBCASE("constant u gives 1/beta") {
    const std::vector<double> u(6, 0.7);
    for (double beta : {0.01, 1.0}) {
      for (double a : diffusion_coefficients(u, beta, DiffusionBoundary::ZeroNeumann)) {
        CHECK(a == doctest::Approx(1.0 / beta));
      }
    }
  }
  SUBCASE("u = (0, 1), beta = 1") {
    const auto a = diffusion_coefficients(std::vector<double>{0.0, 1.0}, 1.0,
                                          DiffusionBoundary::ZeroNeumann);
    REQUIRE(a.size() == 3);
    CHECK(a[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(a[0] == doctest::Approx(1.0));
    CHECK(a[2] == doctest::Approx(1.0));
  }
  SUBCASE("large beta tends to 1/beta") {
    std::mt19937_64 rng(9);
    const auto u = oracle::random_vector(10, rng);
    const double beta = 1e6;
    for (double a : diffusion_coefficients(u, beta, DiffusionBoundary::AntiReflective)) {
      CHECK(a * beta == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("beta must be positive") {
    CHECK_THROWS_AS(diffusion_coefficients(std::vector<double>{1.0, 2.0}, 0.0,
                                           DiffusionBoundary::ZeroNeumann),
                    InvalidArgument);
  }
}

TEST_CASE("diffusion operator 1D") {
  std::mt19937_64 rng(21);
  SUBCASE("constants are annihilated") {
    const auto u = oracle::random_vector(9, rng);
    const std::vector<double> c(9, 3.0);
    for (auto bc : {DiffusionBoundary::ZeroNeumann, DiffusionBoundary::AntiReflective}) {
      const DiffusionOperator l(u, Shape{1, 9}, 0.1, bc);
      for (double x : l.apply(c)) {
        CHECK(std::abs(x) < 1e-12);
      }
    }
  }
  SUBCASE("zero Neumann matches the tridiagonal assembly") {
    const std::size_t n = 5;
    const auto u = oracle::random_vector(n, rng);
    const auto w = oracle::random_vector(n, rng);
    const DiffusionOperator l(u, Shape{1, n}, 0.3, DiffusionBoundary::ZeroNeumann);
    const auto dense = oracle::neumann_tridiagonal(l.coefficients());
    CHECK((oracle::as_vector(l.apply(w)) - dense * oracle::as_vector(w)).norm() < 1e-13);
    CHECK((Eigen::MatrixXd(l.assemble()) - dense).norm() < 1e-13);
  }
  SUBCASE("anti-reflective assembly matches apply") {
    const std::size_t n = 7;
    const auto u = oracle::random_vector(n, rng);
    const DiffusionOperator l(u, Shape{1, n}, 0.2, DiffusionBoundary::AntiReflective);
    const Eigen::MatrixXd dense(l.assemble());
    const auto w = oracle::random_vector(n, rng);
    CHECK((oracle::as_vector(l.apply(w)) - dense * oracle::as_vector(w)).norm() < 1e-12);
    const auto diag = l.diagonal();
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(diag[k] == doctest::Approx(dense(k, k)));
    }
  }
  SUBCASE("shape mismatch") {
    const DiffusionOperator l(std::vector<double>(4, 0.0), Shape{1, 4}, 1.0,
                              DiffusionBoundary::ZeroNeumann);
    CHECK_THROWS_AS(l.apply(std::vector<double>(5, 0.0)), InvalidArgument);
  }
}

TEST_CASE("diffusion operator 2D") {
  std::mt19937_64 rng(22);
  const std::size_t n = 6;
  const auto u = oracle::random_vector(n * n, rng);
  for (auto bc : {DiffusionBoundary::ZeroNeumann, DiffusionBoundary::AntiReflective}) {
    CAPTURE(to_string(bc));
    const DiffusionOperator l(u, Shape{2, n}, 0.05, bc);
    const Eigen::MatrixXd dense(l.assemble());
    const auto w = oracle::random_vector(n * n, rng);
    CHECK((oracle::as_vector(l.apply(w)) - dense * oracle::as_vector(w)).norm() < 1e-11);
    for (double x : l.apply(std::vector<double>(n * n, -1.5))) {
      CHECK(std::abs(x) < 1e-11);
    }
    if (bc == DiffusionBoundary::ZeroNeumann) {
      CHECK((dense - dense.transpose()).norm() < 1e-12);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
      CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("Euler-Lagrange residual") {
  std::mt19937_64 rng(23);
  SUBCASE("constant data under a row-stochastic blur") {
    const std::vector<double> c(12, 0.4);
    const BlurOperator h(out_of_focus_psf(3), BoundaryCondition::Reflective, 12);
    for (double g : el_residual(h, c, c, 0.1, 0.1, DiffusionBoundary::ZeroNeumann)) {
      CHECK(std::abs(g) < 1e-13);
    }
  }
  SUBCASE("identity blur with a vanishing alpha") {
    const auto u = oracle::random_vector(10, rng);
    const BlurOperator h(SymmetricPsf::identity(1), BoundaryCondition::Reflective, 10);
    const double alpha = 1e-9;
    const auto g = el_residual(h, u, u, alpha, 0.1, DiffusionBoundary::ZeroNeumann);
    const DiffusionOperator l(u, Shape{1, 10}, 0.1, DiffusionBoundary::ZeroNeumann);
    CHECK(oracle::as_vector(g).norm() <= alpha * oracle::as_vector(l.apply(u)).norm() * (1 + 1e-12));
  }
  SUBCASE("matches a dense assembly") {
    const std::size_t n = 9;
    const auto psf = out_of_focus_psf(2);
    const auto u = oracle::random_vector(n, rng);
    const auto v = oracle::random_vector(n, rng);
    const double alpha = 0.03;
    const auto a = oracle::blur_1d(psf.coefficients(), oracle::Bc::AntiReflective, n);
    for (auto bc : {DiffusionBoundary::ZeroNeumann, DiffusionBoundary::AntiReflective}) {
      const BlurOperator h(psf, BoundaryCondition::AntiReflective, n);
      const Eigen::MatrixXd l(DiffusionOperator(u, Shape{1, n}, 0.1, bc).assemble());
      const auto uu = oracle::as_vector(u);
      const auto vv = oracle::as_vector(v);
      const Eigen::VectorXd normal = a.transpose() * (a * uu - vv) + alpha * l * uu;
      const Eigen::VectorXd reblur = a * (a * uu - vv) + alpha * l * uu;
      CHECK((oracle::as_vector(el_residual(h, u, v, alpha, 0.1, bc)) - normal).norm() < 1e-12);
      CHECK((oracle::as_vector(el_residual(h, u, v, alpha, 0.1, bc, true)) - reblur).norm() <
            1e-12);
    }
  }
}
