#include <doctest.h>

#include "oracles.hpp"
#include "tvdeblur/errors.hpp"
#include "tvdeblur/krylov.hpp"

using namespace tvdeblur;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

LinearMap dense_map(const MatrixXd& a) {
  return [a](std::span<const double> x, std::span<double> y) {
    Eigen::Map<VectorXd>(y.data(), a.rows()) = a * oracle::as_vector(x);
  };
}

LinearMap dense_inverse(const MatrixXd& a) {
  return [lu = a.partialPivLu()](std::span<const double> x, std::span<double> y) {
    Eigen::Map<VectorXd>(y.data(), x.size()) = lu.solve(oracle::as_vector(x));
  };
}

using Solver = SolveOutcome (*)(const LinearMap&, const LinearMap&, std::span<const double>,
                                std::span<const double>, const KrylovConfig&);

} // namespace

TEST_CASE("krylov solvers on small dense systems") {
  std::mt19937_64 rng(71);
  const KrylovConfig tight{1e-13, 200, true};
  const std::pair<const char*, Solver> solvers[] = {{"pcg", &pcg}, {"pbicgstab", &pbicgstab}};

  for (const auto& [name, solve] : solvers) {
    CAPTURE(name);
    SUBCASE("identity converges in one step") {
      const auto b = oracle::random_vector(8, rng);
      const MatrixXd id = MatrixXd::Identity(8, 8);
      const auto out = solve(dense_map(id), dense_map(id), b, std::vector<double>(8, 0.0), tight);
      CHECK(out.converged);
      CHECK(out.iterations == 1);
      CHECK(oracle::max_abs_diff(out.solution, b) < 1e-14);
    }
    SUBCASE("exact preconditioner converges in one step") {
      MatrixXd a = MatrixXd::Zero(10, 10);
      for (int k = 0; k < 10; ++k) {
        a(k, k) = k + 1.0;
      }
      const auto b = oracle::random_vector(10, rng);
      const auto out =
          solve(dense_map(a), dense_inverse(a), b, std::vector<double>(10, 0.0), tight);
      CHECK(out.converged);
      CHECK(out.iterations == 1);
    }
    SUBCASE("matches a direct solve on SPD systems") {
      const MatrixXd a = oracle::random_spd(8, rng);
      const auto b = oracle::random_vector(8, rng);
      const VectorXd direct = a.ldlt().solve(oracle::as_vector(b));
      const auto out = solve(dense_map(a), {}, b, std::vector<double>(8, 0.0), tight);
      CHECK(out.converged);
      CHECK((oracle::as_vector(out.solution) - direct).norm() < 1e-8);
      CHECK(out.residual_history.size() == static_cast<std::size_t>(out.iterations) + 1);
      CHECK(out.residual_history.front() == doctest::Approx(1.0));
      CHECK(out.residual_history.back() < 1e-13);
    }
    SUBCASE("zero right-hand side") {
      const MatrixXd a = oracle::random_spd(5, rng);
      const auto out = solve(dense_map(a), {}, std::vector<double>(5, 0.0),
                             std::vector<double>(5, 0.0), tight);
      CHECK(out.converged);
      CHECK(out.iterations == 0);
    }
    SUBCASE("iteration cap is reported, not thrown") {
      const MatrixXd a = oracle::random_spd(30, rng);
      const auto b = oracle::random_vector(30, rng);
      const auto out = solve(dense_map(a), {}, b, std::vector<double>(30, 0.0), {1e-14, 2, false});
      CHECK_FALSE(out.converged);
      CHECK(out.iterations == 2);
    }
  }
}

TEST_CASE("pbicgstab on nonsymmetric systems") {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 5; ++trial) {
    const MatrixXd a = oracle::random_matrix(8, 8, rng) + 4.0 * MatrixXd::Identity(8, 8);
    const auto x_true = oracle::random_vector(8, rng);
    const VectorXd b = a * oracle::as_vector(x_true);
    const std::vector<double> bv(b.data(), b.data() + b.size());
    const auto out =
        pbicgstab(dense_map(a), {}, bv, std::vector<double>(8, 0.0), {1e-13, 200, false});
    CHECK(out.converged);
    const VectorXd direct = a.partialPivLu().solve(b);
    CHECK((oracle::as_vector(out.solution) - direct).norm() < 1e-8);
  }
  SUBCASE("right preconditioning monitors the true residual") {
    const MatrixXd a = oracle::random_matrix(12, 12, rng) + 5.0 * MatrixXd::Identity(12, 12);
    const MatrixXd m = a + 0.3 * oracle::random_matrix(12, 12, rng);
    const auto b = oracle::random_vector(12, rng);
    const double tol = 1e-9;
    const auto out =
        pbicgstab(dense_map(a), dense_inverse(m), b, std::vector<double>(12, 0.0), {tol, 100, false});
    CHECK(out.converged);
    const VectorXd r = oracle::as_vector(b) - a * oracle::as_vector(out.solution);
    CHECK(r.norm() / oracle::as_vector(b).norm() < tol * 1.01);
  }
}

TEST_CASE("pcg detects indefiniteness and NaN") {
  MatrixXd a = MatrixXd::Identity(4, 4);
  a(2, 2) = -1.0;
  const std::vector<double> b{0.0, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS(pcg(dense_map(a), {}, b, std::vector<double>(4, 0.0), {}), SolverBreakdown);
  const LinearMap nan_map = [](std::span<const double>, std::span<double> y) {
    std::fill(y.begin(), y.end(), std::nan(""));
  };
  CHECK_THROWS_AS(pcg(nan_map, {}, b, std::vector<double>(4, 0.0), {}), SolverBreakdown);
  CHECK_THROWS_AS(pbicgstab(nan_map, {}, b, std::vector<double>(4, 0.0), {}), SolverBreakdown);
}
