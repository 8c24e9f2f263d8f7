#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tvdeblur/blur.hpp"
#include "tvdeblur/krylov.hpp"
#include "tvdeblur/precond.hpp"
#include "tvdeblur/psf.hpp"
#include "tvdeblur/tv.hpp"

namespace tvdeblur {

/// Normal: (H^T H + alpha L) u = H^T v. Reblur: (H' H + alpha L) u = H' v,
/// where H' = H for a symmetric PSF.
enum class Formulation { Normal, Reblur };

/// None and DiagOnly are the "I" and "D" baselines; the other three pick
/// X, D_X or X_D of the family implied by the blur BC and formulation.
enum class PreconditionerChoice { None, DiagOnly, Plain, ScaledOutside, ScaledSystem };

std::string_view to_string(Formulation f);
Formulation parse_formulation(std::string_view name);
std::string_view to_string(PreconditionerChoice p);
/// Accepts none/I, diag/D, X, D_X, X_D and the concrete names (R, D_R, P_D, ...).
PreconditionerChoice parse_preconditioner_choice(std::string_view name);

struct RestorationConfig {
  BoundaryCondition bc_h = BoundaryCondition::Reflective;
  DiffusionBoundary bc_l = DiffusionBoundary::ZeroNeumann;
  Formulation formulation = Formulation::Normal;
  PreconditionerChoice preconditioner = PreconditionerChoice::ScaledSystem;
  double alpha = 1e-3;
  double beta = 0.1;
  double fp_tol = 1e-3;
  int fp_max = 100;
  KrylovConfig inner;

  /// FP tolerance 1e-3 / 1e-4, inner tolerance 1e-6 / 1e-5 and iteration
  /// caps 1000 / 2000 for 1D / 2D problems.
  static RestorationConfig defaults(int dim);
};

/// Preconditioner family implied by the blur BC and formulation (R for
/// reflective, M for anti-reflective normal equations, P for reblurring).
/// Throws ConfigurationError when no family applies.
PreconditionerFamily implied_family(const RestorationConfig& config);
/// Concrete preconditioner name ("I", "D", "R", "D_R", ...).
std::string preconditioner_label(const RestorationConfig& config);
/// Rejects inconsistent configurations with ConfigurationError.
void validate(const RestorationConfig& config);
/// True when the inner matrix is symmetric and PCG applies.
bool uses_pcg(const RestorationConfig& config);

/// The inner matrix A = H^* H + alpha L for a frozen L, applied through
/// the transform fast path whenever the blur BC has one.
class SystemOperator {
public:
  SystemOperator(const BlurOperator& blur, const SparseMatrix& l, double alpha,
                 Formulation formulation);

  void apply(std::span<const double> w, std::span<double> out) const;
  /// H^* y (H^T or H').
  void apply_adjoint(std::span<const double> y, std::span<double> out) const;
  void apply_blur(std::span<const double> w, std::span<double> out) const;
  std::size_t size() const noexcept { return blur_->shape().size(); }

private:
  const BlurOperator* blur_;
  const SparseMatrix* l_;
  double alpha_;
  Formulation formulation_;
};

/// Diagonally scaled system with D = I + alpha diag(L):
/// H~ = H D^{-1/2}, L~ = D^{-1/2} L D^{-1/2}, u~ = D^{1/2} u.
class ScaledSystem {
public:
  ScaledSystem(const BlurOperator& blur, const SparseMatrix& l, double alpha,
               Formulation formulation);

  std::span<const double> inv_sqrt_diagonal() const noexcept { return inv_sqrt_d_; }

  /// D^{-1/2} A D^{-1/2} w = H~^* H~ w + alpha L~ w.
  void apply(std::span<const double> w, std::span<double> out) const;
  void apply_h(std::span<const double> w, std::span<double> out) const;
  void apply_l(std::span<const double> w, std::span<double> out) const;
  /// H~^* v (or H~' v).
  std::vector<double> rhs(std::span<const double> v) const;
  std::vector<double> scale(std::span<const double> u) const;
  std::vector<double> unscale(std::span<const double> u_tilde) const;

private:
  SystemOperator base_;
  const SparseMatrix* l_;
  std::vector<double> inv_sqrt_d_;
};

struct FpStepResult {
  std::vector<double> next;
  SolveOutcome inner;
};

/// One lagged-diffusivity step from u: rebuild L(u) and the preconditioner,
/// solve the inner system starting from u.
FpStepResult fp_step(const BlurOperator& blur, std::span<const double> u,
                     std::span<const double> v, const RestorationConfig& config);

struct RestorationReport {
  std::vector<double> restored;
  Shape shape;
  std::string solver;
  std::string preconditioner;
  int fp_steps = 0;
  std::vector<int> inner_iterations;
  std::vector<bool> inner_converged;
  double average_inner = 0.0;
  std::vector<double> relative_change;
  std::vector<double> residual_norms;  // ||g(u^k)|| after each step
  double final_residual = 0.0;
  std::optional<double> rre;
  double wall_seconds = 0.0;
  bool fp_converged = false;
  bool aborted = false;
  std::string failure;

  bool all_inner_converged() const;
};

/// Lagged-diffusivity fixed point from u^0 = v. Numerical failures abort the
/// loop and are reported in `aborted` / `failure` with the partial result.
RestorationReport restore(std::span<const double> v, const SymmetricPsf& psf,
                          const RestorationConfig& config,
                          std::span<const double> truth = {});

} // namespace tvdeblur
