#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "tvdeblur/transforms.hpp"

using namespace tvdeblur;

namespace {

Eigen::MatrixXd columns_of(std::size_t n, TransformKind kind, Direction dir) {
  Eigen::MatrixXd m(n, n);
  std::vector<double> e(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    transform_1d(kind, dir, e, e);
    m.col(static_cast<Eigen::Index>(j)) = oracle::as_vector(e);
  }
  return m;
}

} // namespace

TEST_CASE("sine transform") {
  SUBCASE("zero maps to zero") {
    const auto out = dst1_apply(std::vector<double>(7, 0.0));
    for (double x : out) {
      CHECK(x == 0.0);
    }
  }
  SUBCASE("n = 2 on (1, 1)") {
    const auto out = dst1_apply(std::vector<double>{1.0, 1.0});
    CHECK(out[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(out[1]) < 1e-14);
  }
  SUBCASE("matches the dense matrix") {
    for (std::size_t n : {1, 2, 8, 13}) {
      CHECK((columns_of(n, TransformKind::Dst1, Direction::Forward) - oracle::dst(n)).norm() <
            1e-13);
    }
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(dst1_apply(std::vector<double>{}), InvalidArgument);
  }
}

TEST_CASE("cosine transform") {
  SUBCASE("forward e_1 is the constant column") {
    for (std::size_t n : {1, 5, 16}) {
      std::vector<double> e(n, 0.0);
      e[0] = 1.0;
      const auto out = dct_apply(e, Direction::Forward);
      for (double x : out) {
        CHECK(x == doctest::Approx(std::sqrt(1.0 / n)).epsilon(1e-14));
      }
    }
  }
  SUBCASE("forward and inverse match C and C^T") {
    for (std::size_t n : {2, 8, 11}) {
      const auto c = oracle::dct(n);
      CHECK((columns_of(n, TransformKind::Dct, Direction::Forward) - c).norm() < 1e-13);
      CHECK((columns_of(n, TransformKind::Dct, Direction::Inverse) - c.transpose()).norm() <
            1e-13);
    }
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(3);
    const auto v = oracle::random_vector(16, rng);
    const auto back = dct_apply(dct_apply(v, Direction::Forward), Direction::Inverse);
    CHECK(oracle::max_abs_diff(v, back) < 1e-12);
  }
  SUBCASE("zero maps to zero") {
    for (double x : dct_apply(std::vector<double>(6, 0.0), Direction::Forward)) {
      CHECK(x == 0.0);
    }
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(dct_apply(std::vector<double>{}, Direction::Forward), InvalidArgument);
  }
}

TEST_CASE("cosine series") {
  for (std::size_t intervals : {1, 2, 7, 16}) {
    std::mt19937_64 rng(intervals);
    const auto f = oracle::random_vector(intervals + 1, rng);
    std::vector<double> values(intervals + 1);
    cosine_series(intervals).evaluate(f, values);
    for (std::size_t k = 0; k <= intervals; ++k) {
      double expected = 0.0;
      for (std::size_t t = 0; t <= intervals; ++t) {
        expected += f[t] * std::cos(std::numbers::pi * t * k / intervals);
      }
      CHECK(values[k] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("anti-reflective transform") {
  SUBCASE("first column samples 1 - x") {
    for (std::size_t n : {3, 6, 9}) {
      std::vector<double> e(n, 0.0);
      e[0] = 1.0;
      const auto out = ar_apply(e, Direction::Forward);
      for (std::size_t j = 0; j < n; ++j) {
        const double expected = j + 1 < n ? 1.0 - static_cast<double>(j) / (n - 1.0) : 0.0;
        CHECK(out[j] == doctest::Approx(expected).epsilon(1e-13));
      }
    }
  }
  SUBCASE("last column mirrors the first") {
    const std::size_t n = 9;
    std::vector<double> first(n, 0.0);
    std::vector<double> last(n, 0.0);
    first[0] = 1.0;
    last[n - 1] = 1.0;
    const auto a = ar_apply(first, Direction::Forward);
    const auto b = ar_apply(last, Direction::Forward);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(b[j] == doctest::Approx(a[n - 1 - j]).epsilon(1e-13));
    }
  }
  SUBCASE("matches the sampled sine-plus-linear columns") {
    for (std::size_t n : {3, 4, 8, 17}) {
      const auto t = oracle::ar_transform(n);
      CHECK((columns_of(n, TransformKind::AntiReflective, Direction::Forward) - t).norm() <
            1e-12);
      CHECK((columns_of(n, TransformKind::AntiReflective, Direction::Inverse) - t.inverse())
                .norm() < 1e-10);
    }
  }
  SUBCASE("transposed applies") {
    const std::size_t n = 10;
    const auto t = oracle::ar_transform(n);
    const auto& ar = anti_reflective_transform(n);
    std::mt19937_64 rng(5);
    const auto v = oracle::random_vector(n, rng);
    std::vector<double> out(n);
    ar.apply_transposed(v, out, Direction::Forward);
    CHECK((oracle::as_vector(out) - t.transpose() * oracle::as_vector(v)).norm() < 1e-12);
    ar.apply_transposed(v, out, Direction::Inverse);
    CHECK((oracle::as_vector(out) - t.inverse().transpose() * oracle::as_vector(v)).norm() <
          1e-10);
  }
  SUBCASE("round trip") {
    std::mt19937_64 rng(7);
    const auto v = oracle::random_vector(16, rng);
    const auto back = ar_apply(ar_apply(v, Direction::Forward), Direction::Inverse);
    CHECK(oracle::max_abs_diff(v, back) < 1e-10);
  }
  SUBCASE("too small") {
    CHECK_THROWS_AS(ar_apply(std::vector<double>{1.0, 2.0}, Direction::Forward), InvalidArgument);
  }
}

TEST_CASE("sine-hat transform") {
  const std::size_t n = 7;
  CHECK((columns_of(n, TransformKind::SineHat, Direction::Forward) - oracle::sine_hat(n)).norm() <
        1e-13);
}

TEST_CASE("tensor transforms") {
  const std::size_t n = 8;
  std::mt19937_64 rng(11);
  SUBCASE("zero grid") {
    std::vector<double> g(n * n, 0.0);
    tensor_apply_2d(TransformKind::Dct, Direction::Forward, n, g);
    for (double x : g) {
      CHECK(x == 0.0);
    }
  }
  SUBCASE("rank one grid") {
    for (auto kind : {TransformKind::Dct, TransformKind::Dst1, TransformKind::AntiReflective}) {
      const auto a = oracle::random_vector(n, rng);
      const auto b = oracle::random_vector(n, rng);
      std::vector<double> g(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          g[i * n + j] = a[i] * b[j];
        }
      }
      tensor_apply_2d(kind, Direction::Forward, n, g);
      std::vector<double> xa(n);
      std::vector<double> xb(n);
      transform_1d(kind, Direction::Forward, a, xa);
      transform_1d(kind, Direction::Forward, b, xb);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          CHECK(g[i * n + j] == doctest::Approx(xa[i] * xb[j]).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("matches the Kronecker product") {
    const auto t = oracle::ar_transform(n);
    const auto g = oracle::random_vector(n * n, rng);
    auto out = g;
    transform(TransformKind::AntiReflective, Direction::Forward, Shape{2, n}, out);
    CHECK((oracle::as_vector(out) - oracle::kron(t, t) * oracle::as_vector(g)).norm() < 1e-11);
    out = g;
    transform_transposed(TransformKind::AntiReflective, Direction::Forward, Shape{2, n}, out);
    CHECK((oracle::as_vector(out) - oracle::kron(t, t).transpose() * oracle::as_vector(g))
              .norm() < 1e-11);
  }
  SUBCASE("sine twice is the identity") {
    const auto g = oracle::random_vector(n * n, rng);
    auto out = g;
    tensor_apply_2d(TransformKind::Dst1, Direction::Forward, n, out);
    tensor_apply_2d(TransformKind::Dst1, Direction::Forward, n, out);
    CHECK(oracle::max_abs_diff(g, out) < 1e-12);
  }
  SUBCASE("non-square grid") {
    Grid2D g;
    g.n = 3;
    g.data.assign(8, 1.0);
    CHECK_THROWS_AS(tensor_apply_2d(TransformKind::Dct, g, Direction::Forward), InvalidArgument);
  }
}
