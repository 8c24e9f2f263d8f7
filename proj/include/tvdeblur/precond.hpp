#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tvdeblur/blur.hpp"
#include "tvdeblur/grid.hpp"
#include "tvdeblur/transforms.hpp"
#include "tvdeblur/tv.hpp"

namespace tvdeblur {

enum class AlgebraProjectionKind { Cosine, Sine, SineHat, AntiReflectiveAlg };

/// Transform diagonalizing the algebra of `kind`.
TransformKind algebra_transform(AlgebraProjectionKind kind);

// Frobenius-optimal projections onto transform algebras, returned as the
// eigenvalue array in transform order. Sparse inputs cost
// O(nnz + n log n): the double sum over entries collapses to diagonal and
// anti-diagonal sums followed by one cosine series evaluation.
//
// Cosine: A ≈ C Λ C^T, Λ = diag(C^T A C).
// Sine:   A ≈ S Λ S.
// SineHat: (A_11, sine eigenvalues of the interior block, A_nn).

std::vector<double> cosine_project(const SparseMatrix& a);
std::vector<double> cosine_project(const Eigen::MatrixXd& a);
std::vector<double> sine_project(const SparseMatrix& a);
std::vector<double> sine_project(const Eigen::MatrixXd& a);
std::vector<double> sinehat_project(const SparseMatrix& a);
std::vector<double> sinehat_project(const Eigen::MatrixXd& a);

/// τ matrix T(z) - H(σ²z, Jσ²z) with σ(z) = (z_2, ..., z_n, 0).
struct TauRepresentation {
  std::vector<double> z;
};

Eigen::MatrixXd tau_matrix(std::span<const double> z);
/// Recovers z from the first column b by z_k = b_k + z_{k+2}. Throws
/// ConsistencyError when the reconstruction misses B by more than
/// tol * max(1, ||B||_F).
TauRepresentation tau_extract_z(const Eigen::MatrixXd& b, double tol = 1e-10);

/// AR(A): s(A(2:n-1, 2:n-1)) bordered by the columns
/// w_r = z_r + 2 sum_{k>r} z_k. Its eigenvalues in T_n order are
/// (w_1, interior sine eigenvalues, w_1).
struct ArProjection {
  std::vector<double> z;            // length n - 2
  std::vector<double> eigenvalues;  // length n
};

ArProjection ar_project(const SparseMatrix& a);
ArProjection ar_project(const Eigen::MatrixXd& a);
/// Dense AR(A) assembled from the bordered formula (test oracle).
Eigen::MatrixXd ar_matrix(std::span<const double> z);

/// One-level projection of an n-by-n sparse matrix.
std::vector<double> project_1d(AlgebraProjectionKind kind, const SparseMatrix& a);

/// Level-2 projection of an n²-by-n² matrix (row-major grid ordering):
/// Q p_1(Q^T p_1(A) Q) Q^T, with p_1 the blockwise one-level projection.
/// Eigenvalue (p, q) sits at p * n + q, matching the tensor transforms.
std::vector<double> level2_project(AlgebraProjectionKind kind, const SparseMatrix& a,
                                   std::size_t n);
/// Dense variant; refuses n > 32.
std::vector<double> level2_project(AlgebraProjectionKind kind, const Eigen::MatrixXd& a,
                                   std::size_t n);

/// Dispatches to project_1d or level2_project by shape.
std::vector<double> project(AlgebraProjectionKind kind, const SparseMatrix& a, Shape shape);

enum class PreconditionerFamily { R, M, P };
enum class ScalingVariant { Plain, ScaledOutside, ScaledSystem };

/// R, D_R, R_D, M, D_M, M_D, P, D_P, P_D.
struct PreconditionerKind {
  PreconditionerFamily family = PreconditionerFamily::R;
  ScalingVariant variant = ScalingVariant::Plain;

  std::string name() const;
  friend bool operator==(const PreconditionerKind&, const PreconditionerKind&) = default;
};

PreconditionerKind parse_preconditioner_kind(std::string_view name);
AlgebraProjectionKind family_projection(PreconditionerFamily family);
BoundaryCondition family_boundary(PreconditionerFamily family);

/// A preconditioner X = Q Λ Q^{-1}, optionally wrapped as D^{1/2} X D^{1/2}.
///
/// Eigenvalues below -1e-12 max|λ| raise IndefinitePreconditioner; values
/// below 1e-14 max|λ| are clamped to that floor with a logged warning.
class FactoredPreconditioner {
public:
  FactoredPreconditioner(PreconditionerKind kind, TransformKind transform, Shape shape,
                         std::vector<double> eigenvalues, std::vector<double> sqrt_scale = {},
                         double alpha = 0.0);

  PreconditionerKind kind() const noexcept { return kind_; }
  TransformKind transform() const noexcept { return transform_; }
  Shape shape() const noexcept { return shape_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  /// D^{1/2} for D_X kinds, empty otherwise.
  std::span<const double> sqrt_scale() const noexcept { return sqrt_scale_; }
  std::size_t clamped() const noexcept { return clamped_; }

  void apply_inverse(std::span<const double> b, std::span<double> out) const;
  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply_inverse(std::span<const double> b) const;
  std::vector<double> apply(std::span<const double> x) const;

private:
  PreconditionerKind kind_;
  TransformKind transform_;
  Shape shape_;
  std::vector<double> eigenvalues_;
  std::vector<double> sqrt_scale_;
  std::size_t clamped_ = 0;
};

/// D = I + alpha diag(L).
std::vector<double> scaling_diagonal(const SparseMatrix& l, double alpha);

/// Builds the preconditioner of `kind` for H^*H + alpha L (R and M
/// families) or H'H + alpha L (P family). For X_D kinds the result
/// preconditions the scaled matrix D^{-1/2} A D^{-1/2}.
FactoredPreconditioner assemble_preconditioner(PreconditionerKind kind, const BlurOperator& blur,
                                               const SparseMatrix& l, double alpha);

/// Dense matrix of a linear map given by its action (test and diagnostic use).
Eigen::MatrixXd dense_from_action(std::size_t size,
                                  const std::function<void(std::span<const double>,
                                                           std::span<double>)>& action);

} // namespace tvdeblur
