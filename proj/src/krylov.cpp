#include "tvdeblur/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tvdeblur/errors.hpp"
#include "tvdeblur/grid.hpp"

namespace tvdeblur {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += s * x
void axpy(double s, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] += s * x[k];
  }
}

void precondition(const LinearMap& minv, std::span<const double> in, std::span<double> out) {
  if (minv) {
    minv(in, out);
  } else {
    std::copy(in.begin(), in.end(), out.begin());
  }
}

void check_finite(double value, const char* what, int iteration) {
  if (!std::isfinite(value)) {
    throw SolverBreakdown(std::string(what) + " is not finite", iteration);
  }
}

void validate(const LinearMap& a, std::span<const double> b, std::span<const double> x0,
              const KrylovConfig& config) {
  if (!a) {
    throw InvalidArgument("Krylov solver: operator is empty");
  }
  require_size(x0, b.size(), "Krylov solver initial guess");
  if (!(config.tol > 0.0)) {
    throw InvalidArgument("Krylov solver: tol must be positive");
  }
  if (config.max_iterations <= 0) {
    throw InvalidArgument("Krylov solver: max_iterations must be positive");
  }
}

} // namespace

SolveOutcome pcg(const LinearMap& apply_a, const LinearMap& apply_minv, std::span<const double> b,
                 std::span<const double> x0, const KrylovConfig& config) {
  validate(apply_a, b, x0, config);
  const std::size_t n = b.size();
  SolveOutcome out;
  out.solution.assign(x0.begin(), x0.end());
  std::vector<double>& x = out.solution;
  std::vector<double> r(n), z(n), p(n), q(n);

  apply_a(x, q);
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = b[k] - q[k];
  }
  const double r0 = norm(r);
  check_finite(r0, "initial residual", 0);
  if (config.record_history) {
    out.residual_history.push_back(1.0);
  }
  if (r0 == 0.0) {
    out.converged = true;
    return out;
  }

  double rho_prev = 0.0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    precondition(apply_minv, r, z);
    const double rho = dot(r, z);
    check_finite(rho, "PCG inner product r^T z", it);
    if (it == 1) {
      p = z;
    } else {
      const double beta = rho / rho_prev;
      for (std::size_t k = 0; k < n; ++k) {
        p[k] = z[k] + beta * p[k];
      }
    }
    apply_a(p, q);
    const double curvature = dot(p, q);
    check_finite(curvature, "PCG inner product p^T A p", it);
    if (curvature <= 0.0) {
      throw SolverBreakdown("PCG: operator is not positive definite (p^T A p <= 0)", it);
    }
    const double step = rho / curvature;
    axpy(step, p, x);
    axpy(-step, q, r);
    rho_prev = rho;

    const double rel = norm(r) / r0;
    check_finite(rel, "PCG residual", it);
    out.iterations = it;
    if (config.record_history) {
      out.residual_history.push_back(rel);
    }
    if (rel < config.tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

SolveOutcome pbicgstab(const LinearMap& apply_a, const LinearMap& apply_minv,
                       std::span<const double> b, std::span<const double> x0,
                       const KrylovConfig& config) {
  validate(apply_a, b, x0, config);
  const std::size_t n = b.size();
  SolveOutcome out;
  out.solution.assign(x0.begin(), x0.end());
  std::vector<double>& x = out.solution;
  std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), p_hat(n), s_hat(n);

  apply_a(x, t);
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = b[k] - t[k];
  }
  r_hat = r;
  const double r0 = norm(r);
  check_finite(r0, "initial residual", 0);
  if (config.record_history) {
    out.residual_history.push_back(1.0);
  }
  if (r0 == 0.0) {
    out.converged = true;
    return out;
  }

  const double tiny = 1e-300;
  double rho_prev = 1.0;
  double alpha = 1.0;
  double omega = 1.0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const double rho = dot(r_hat, r);
    check_finite(rho, "BiCGstab rho", it);
    if (std::abs(rho) <= tiny * r0 * r0) {
      throw SolverBreakdown("BiCGstab breakdown: rho = 0", it);
    }
    if (it == 1) {
      p = r;
    } else {
      const double beta = (rho / rho_prev) * (alpha / omega);
      for (std::size_t k = 0; k < n; ++k) {
        p[k] = r[k] + beta * (p[k] - omega * v[k]);
      }
    }
    precondition(apply_minv, p, p_hat);
    apply_a(p_hat, v);
    const double denom = dot(r_hat, v);
    check_finite(denom, "BiCGstab r_hat^T v", it);
    if (std::abs(denom) <= tiny * r0 * r0) {
      throw SolverBreakdown("BiCGstab breakdown: r_hat^T v = 0", it);
    }
    alpha = rho / denom;
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = r[k] - alpha * v[k];
    }
    out.iterations = it;
    const double rel_half = norm(s) / r0;
    check_finite(rel_half, "BiCGstab residual", it);
    if (rel_half < config.tol) {
      axpy(alpha, p_hat, x);
      r = s;
      if (config.record_history) {
        out.residual_history.push_back(rel_half);
      }
      out.converged = true;
      return out;
    }
    precondition(apply_minv, s, s_hat);
    apply_a(s_hat, t);
    const double tt = dot(t, t);
    check_finite(tt, "BiCGstab t^T t", it);
    if (tt <= tiny) {
      throw SolverBreakdown("BiCGstab breakdown: t = 0", it);
    }
    omega = dot(t, s) / tt;
    check_finite(omega, "BiCGstab omega", it);
    if (omega == 0.0) {
      throw SolverBreakdown("BiCGstab breakdown: omega = 0", it);
    }
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p_hat[k] + omega * s_hat[k];
      r[k] = s[k] - omega * t[k];
    }
    rho_prev = rho;
    const double rel = norm(r) / r0;
    check_finite(rel, "BiCGstab residual", it);
    if (config.record_history) {
      out.residual_history.push_back(rel);
    }
    if (rel < config.tol) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

} // namespace tvdeblur
