#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tvdeblur/grid.hpp"
#include "tvdeblur/psf.hpp"
#include "tvdeblur/transforms.hpp"

namespace tvdeblur {

enum class BoundaryCondition { ZeroDirichlet, Periodic, Reflective, AntiReflective };

std::string_view to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary(std::string_view name);

/// How an index k (0-based, possibly outside [0, n)) of the extended signal
/// is expressed through the unknowns: value(k) = sum_t weight[t] * u[index[t]].
struct Extension {
  std::array<long, 2> index{};
  std::array<double, 2> weight{};
  int count = 0;
};

/// 1D extension rules. Zero-Dirichlet: 0. Periodic: wrap. Reflective:
/// u_{1-j} = u_j. Anti-reflective: u_{1-j} = 2u_1 - u_{j+1},
/// u_{n+j} = 2u_n - u_{n-j}. Requires the distance to the domain <= n - 1.
/// 2D extensions are the tensor product of two 1D rules, which reproduces
/// the anti-reflective corner formulas.
Extension extend_index(BoundaryCondition bc, long n, long k);

/// Pads a 1D signal by m samples on each side.
std::vector<double> pad_signal(std::span<const double> u, std::size_t m, BoundaryCondition bc);
/// Pads a row-major n-by-n image to (n + 2m)-by-(n + 2m).
std::vector<double> pad_image(std::span<const double> u, std::size_t n, std::size_t m,
                              BoundaryCondition bc);

/// Matrix-free blurring operator A for a symmetric PSF under a boundary
/// condition. `apply` is the reference pad-convolve-crop semantics; for
/// reflective and anti-reflective BCs a transform-diagonalized fast path
/// A = Q Λ Q^{-1} is available (Q = C_n or T_n, tensorized in 2D).
class BlurOperator {
public:
  BlurOperator(SymmetricPsf psf, BoundaryCondition bc, std::size_t n);

  const SymmetricPsf& psf() const noexcept { return psf_; }
  BoundaryCondition boundary() const noexcept { return bc_; }
  Shape shape() const noexcept { return shape_; }

  void apply(std::span<const double> u, std::span<double> out) const;
  void apply_transpose(std::span<const double> y, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> u) const;
  std::vector<double> apply_transpose(std::span<const double> y) const;

  bool has_fast_path() const noexcept { return !eigenvalues_.empty(); }
  /// Transform kind diagonalizing the operator (Dct or AntiReflective).
  TransformKind transform_kind() const;
  void apply_fast(std::span<const double> u, std::span<double> out) const;
  void apply_transpose_fast(std::span<const double> y, std::span<double> out) const;

  /// H', the blur with the PSF rotated by 180 degrees. For a symmetric PSF
  /// H' = H, so these forward to apply / apply_fast.
  void apply_rotated(std::span<const double> y, std::span<double> out) const { apply(y, out); }
  std::vector<double> apply_rotated(std::span<const double> y) const { return apply(y); }
  void apply_rotated_fast(std::span<const double> y, std::span<double> out) const {
    apply_fast(y, out);
  }

  /// Eigenvalues in transform order. Throws UnsupportedBoundary unless the
  /// BC is reflective or anti-reflective.
  std::span<const double> eigenvalues() const;

private:
  SymmetricPsf psf_;
  BoundaryCondition bc_;
  Shape shape_;
  std::vector<double> eigenvalues_;
};

/// Sample points of the symbol giving the eigenvalues:
/// reflective y_j = (j-1) pi / n; anti-reflective y_j = (j-1) pi / (n-1)
/// for j < n and y_n = 0.
std::vector<double> eigenvalue_grid(BoundaryCondition bc, std::size_t n);
std::vector<double> blur_eigenvalues(const SymmetricPsf& psf, BoundaryCondition bc,
                                     std::size_t n);

/// Dense matrix of the blurring operator assembled row by row from the
/// extension rules. Testing oracle only: refuses more than 256 unknowns.
Eigen::MatrixXd dense_blur_matrix(const SymmetricPsf& psf, BoundaryCondition bc, std::size_t n);

} // namespace tvdeblur
