#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "tvdeblur/blur.hpp"
#include "tvdeblur/grid.hpp"

namespace tvdeblur {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class DiffusionBoundary { ZeroNeumann, AntiReflective };

std::string_view to_string(DiffusionBoundary bc);
DiffusionBoundary parse_diffusion_boundary(std::string_view name);

/// Lagged-diffusivity operator L(u): the discretization of
/// -div(a grad w) with a = 1 / sqrt(|grad u|^2 + beta^2) frozen at u.
///
/// Coefficients live on cell edges (unit spacing). In 1D there are n + 1 of
/// them, edge k sitting between samples k - 1 and k. In 2D, horizontal edges
/// (between columns) form an n x (n + 1) array and vertical edges an
/// (n + 1) x n array, both row-major. The transverse gradient at an edge is
/// the mean of the two centered differences at its endpoints.
///
/// Out-of-domain samples of u and w come from the boundary rule: reflection
/// for zero Neumann, anti-reflection otherwise. The zero-Neumann operator is
/// symmetric positive semidefinite; both variants annihilate constants.
class DiffusionOperator {
public:
  DiffusionOperator(std::span<const double> u, Shape shape, double beta, DiffusionBoundary bc);

  Shape shape() const noexcept { return shape_; }
  double beta() const noexcept { return beta_; }
  DiffusionBoundary boundary() const noexcept { return bc_; }

  /// 1D edge coefficients (length n + 1).
  std::span<const double> coefficients() const;
  std::span<const double> horizontal() const;
  std::span<const double> vertical() const;

  void apply(std::span<const double> w, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> w) const;
  SparseMatrix assemble() const;
  std::vector<double> diagonal() const;

private:
  Shape shape_;
  double beta_;
  DiffusionBoundary bc_;
  std::vector<double> horizontal_;  // 1D: the only coefficient array
  std::vector<double> vertical_;
};

/// 1D midpoint coefficients a_{k - 1/2}, k = 0..n.
std::vector<double> diffusion_coefficients(std::span<const double> u, double beta,
                                           DiffusionBoundary bc);

/// Euler-Lagrange residual g(u) = H^*(H u - v) + alpha L(u) u. With
/// `reblur` the adjoint is replaced by H' (= H for a symmetric PSF).
std::vector<double> el_residual(const BlurOperator& blur, std::span<const double> u,
                                std::span<const double> v, double alpha, double beta,
                                DiffusionBoundary bc, bool reblur = false);

} // namespace tvdeblur
