#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tvdeblur {

/// y = Op(x). Implementations must not assume x and y alias.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct KrylovConfig {
  double tol = 1e-6;
  int max_iterations = 1000;
  bool record_history = false;
};

struct SolveOutcome {
  std::vector<double> solution;
  int iterations = 0;
  std::vector<double> residual_history;  // ||r_k|| / ||r_0||, k = 0..iterations
  bool converged = false;
};

/// Preconditioned conjugate gradients. Stops when ||r_k|| / ||r_0|| < tol.
/// An empty `apply_minv` means no preconditioning.
SolveOutcome pcg(const LinearMap& apply_a, const LinearMap& apply_minv, std::span<const double> b,
                 std::span<const double> x0, const KrylovConfig& config);

/// BiCGstab with right preconditioning: iterates on A M^{-1} y = b,
/// x = M^{-1} y, so the monitored residual is the true residual of A x = b.
SolveOutcome pbicgstab(const LinearMap& apply_a, const LinearMap& apply_minv,
                       std::span<const double> b, std::span<const double> x0,
                       const KrylovConfig& config);

} // namespace tvdeblur
