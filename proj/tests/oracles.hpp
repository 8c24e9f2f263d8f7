#pragma once
// Dense reference matrices built directly from closed-form definitions,
// independent of the fast library code paths.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

// [C]_{ij} = sqrt((2 - δ_{j0}) / n) cos((2i + 1) j π / (2n)), 0-based.
inline MatrixXd dct(std::size_t n) {
  MatrixXd c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double scale = std::sqrt((j == 0 ? 1.0 : 2.0) / static_cast<double>(n));
      c(i, j) = scale * std::cos((2.0 * i + 1.0) * j * pi / (2.0 * n));
    }
  }
  return c;
}

// [S]_{ij} = sqrt(2 / (n + 1)) sin(i j π / (n + 1)), 1-based.
inline MatrixXd dst(std::size_t n) {
  MatrixXd s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s(i, j) = std::sqrt(2.0 / (n + 1.0)) * std::sin((i + 1.0) * (j + 1.0) * pi / (n + 1.0));
    }
  }
  return s;
}

// diag(1, S_{n-2}, 1).
inline MatrixXd sine_hat(std::size_t n) {
  MatrixXd s = MatrixXd::Zero(n, n);
  s(0, 0) = 1.0;
  s(n - 1, n - 1) = 1.0;
  s.block(1, 1, n - 2, n - 2) = dst(n - 2);
  return s;
}

// Columns (1 - y/π, sin y, ..., sin((n-2) y), y/π) sampled at y_i = iπ/(n-1),
// with the sine block scaled by sqrt(2/(n-1)).
inline MatrixXd ar_transform(std::size_t n) {
  MatrixXd t(n, n);
  const double h = pi / (n - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = i * h;
    t(i, 0) = 1.0 - y / pi;
    for (std::size_t j = 1; j + 1 < n; ++j) {
      t(i, j) = std::sqrt(2.0 / (n - 1.0)) * std::sin(j * y);
    }
    t(i, n - 1) = y / pi;
  }
  return t;
}

inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return k;
}

// Frobenius mass of the off-diagonal part.
inline double off_diagonal_norm(const MatrixXd& a) {
  MatrixXd d = a;
  d.diagonal().setZero();
  return d.norm();
}

// 1D blur matrix with an explicitly extended signal: entry (i, k) collects
// every h_{i-j} whose source j (possibly outside) maps onto unknown k.
// Reflective: u_{-1-j} = u_j; anti-reflective: u_{-j} = 2u_0 - u_j (0-based).
enum class Bc { Zero, Periodic, Reflective, AntiReflective };

inline MatrixXd blur_1d(std::span<const double> h, Bc bc, std::size_t n) {
  const long m = static_cast<long>(h.size() / 2);
  const long nn = static_cast<long>(n);
  MatrixXd a = MatrixXd::Zero(n, n);
  for (long i = 0; i < nn; ++i) {
    for (long d = -m; d <= m; ++d) {
      const double w = h[d + m];
      const long j = i - d;
      if (j >= 0 && j < nn) {
        a(i, j) += w;
        continue;
      }
      switch (bc) {
      case Bc::Zero:
        break;
      case Bc::Periodic:
        a(i, (j % nn + nn) % nn) += w;
        break;
      case Bc::Reflective:
        a(i, j < 0 ? -1 - j : 2 * nn - 1 - j) += w;
        break;
      case Bc::AntiReflective:
        if (j < 0) {
          a(i, 0) += 2.0 * w;
          a(i, -j) -= w;
        } else {
          a(i, nn - 1) += 2.0 * w;
          a(i, 2 * (nn - 1) - j) -= w;
        }
        break;
      }
    }
  }
  return a;
}

// 1D zero-Neumann lagged-diffusivity matrix, tridiagonal, from the
// edge coefficients a_0..a_n (a_0 and a_n multiply zero differences).
inline MatrixXd neumann_tridiagonal(std::span<const double> a) {
  const std::size_t n = a.size() - 1;
  MatrixXd l = MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double c = a[k + 1];
    l(k, k) += c;
    l(k + 1, k + 1) += c;
    l(k, k + 1) -= c;
    l(k + 1, k) -= c;
  }
  return l;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) {
    x = dist(rng);
  }
  return v;
}

inline MatrixXd random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      a(i, j) = dist(rng);
    }
  }
  return a;
}

inline MatrixXd random_spd(std::size_t n, std::mt19937_64& rng) {
  const MatrixXd b = random_matrix(n, n, rng);
  return b * b.transpose() + 0.1 * MatrixXd::Identity(n, n);
}

inline VectorXd as_vector(std::span<const double> v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d = std::max(d, std::abs(a[k] - b[k]));
  }
  return d;
}

} // namespace oracle
