#include "tvdeblur/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tvdeblur {
namespace {

double norm2(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

Shape shape_for(std::size_t count, int dim) {
  if (dim == 1) {
    return {1, count};
  }
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (n * n != count) {
    throw InvalidArgument("restore: 2D data must hold n*n samples");
  }
  return {2, n};
}

SolveOutcome solve(const RestorationConfig& config, const LinearMap& a, const LinearMap& minv,
                   std::span<const double> rhs, std::span<const double> x0) {
  return uses_pcg(config) ? pcg(a, minv, rhs, x0, config.inner)
                          : pbicgstab(a, minv, rhs, x0, config.inner);
}

} // namespace

std::string_view to_string(Formulation f) { return f == Formulation::Normal ? "normal" : "reblur"; }

Formulation parse_formulation(std::string_view name) {
  if (name == "normal" || name == "fp") {
    return Formulation::Normal;
  }
  if (name == "reblur" || name == "fpp") {
    return Formulation::Reblur;
  }
  throw InvalidArgument("unknown formulation '" + std::string(name) + "'");
}

std::string_view to_string(PreconditionerChoice p) {
  switch (p) {
  case PreconditionerChoice::None:
    return "I";
  case PreconditionerChoice::DiagOnly:
    return "D";
  case PreconditionerChoice::Plain:
    return "X";
  case PreconditionerChoice::ScaledOutside:
    return "D_X";
  case PreconditionerChoice::ScaledSystem:
    return "X_D";
  }
  return "?";
}

PreconditionerChoice parse_preconditioner_choice(std::string_view name) {
  if (name == "I" || name == "none") {
    return PreconditionerChoice::None;
  }
  if (name == "D" || name == "diag") {
    return PreconditionerChoice::DiagOnly;
  }
  if (name == "X") {
    return PreconditionerChoice::Plain;
  }
  if (name == "D_X") {
    return PreconditionerChoice::ScaledOutside;
  }
  if (name == "X_D") {
    return PreconditionerChoice::ScaledSystem;
  }
  switch (parse_preconditioner_kind(name).variant) {
  case ScalingVariant::Plain:
    return PreconditionerChoice::Plain;
  case ScalingVariant::ScaledOutside:
    return PreconditionerChoice::ScaledOutside;
  case ScalingVariant::ScaledSystem:
    return PreconditionerChoice::ScaledSystem;
  }
  throw InvalidArgument("unknown preconditioner '" + std::string(name) + "'");
}

RestorationConfig RestorationConfig::defaults(int dim) {
  RestorationConfig c;
  if (dim == 2) {
    c.fp_tol = 1e-4;
    c.inner.tol = 1e-5;
    c.inner.max_iterations = 2000;
  } else {
    c.fp_tol = 1e-3;
    c.inner.tol = 1e-6;
    c.inner.max_iterations = 1000;
  }
  return c;
}

PreconditionerFamily implied_family(const RestorationConfig& config) {
  if (config.bc_h == BoundaryCondition::Reflective && config.formulation == Formulation::Normal) {
    return PreconditionerFamily::R;
  }
  if (config.bc_h == BoundaryCondition::AntiReflective) {
    return config.formulation == Formulation::Normal ? PreconditionerFamily::M
                                                     : PreconditionerFamily::P;
  }
  throw ConfigurationError("no transform preconditioner for blur BC '" +
                           std::string(to_string(config.bc_h)) + "' with formulation '" +
                           std::string(to_string(config.formulation)) + "'");
}

std::string preconditioner_label(const RestorationConfig& config) {
  switch (config.preconditioner) {
  case PreconditionerChoice::None:
    return "I";
  case PreconditionerChoice::DiagOnly:
    return "D";
  case PreconditionerChoice::Plain:
    return PreconditionerKind{implied_family(config), ScalingVariant::Plain}.name();
  case PreconditionerChoice::ScaledOutside:
    return PreconditionerKind{implied_family(config), ScalingVariant::ScaledOutside}.name();
  case PreconditionerChoice::ScaledSystem:
    return PreconditionerKind{implied_family(config), ScalingVariant::ScaledSystem}.name();
  }
  return "?";
}

void validate(const RestorationConfig& config) {
  if (!(config.alpha > 0.0) || !std::isfinite(config.alpha)) {
    throw ConfigurationError("alpha must be a positive real");
  }
  if (!(config.beta > 0.0) || !std::isfinite(config.beta)) {
    throw ConfigurationError("beta must be a positive real");
  }
  if (!(config.fp_tol > 0.0)) {
    throw ConfigurationError("fp_tol must be positive");
  }
  if (config.fp_max <= 0) {
    throw ConfigurationError("fp_max must be positive");
  }
  if (!(config.inner.tol > 0.0) || config.inner.max_iterations <= 0) {
    throw ConfigurationError("inner solver tolerance and iteration cap must be positive");
  }
  if (config.formulation == Formulation::Reblur &&
      config.bc_h != BoundaryCondition::AntiReflective) {
    throw ConfigurationError("the reblurred formulation requires anti-reflective blur BCs");
  }
  if (config.preconditioner != PreconditionerChoice::None &&
      config.preconditioner != PreconditionerChoice::DiagOnly) {
    implied_family(config);
  }
}

bool uses_pcg(const RestorationConfig& config) {
  return config.formulation == Formulation::Normal &&
         config.bc_l == DiffusionBoundary::ZeroNeumann;
}

SystemOperator::SystemOperator(const BlurOperator& blur, const SparseMatrix& l, double alpha,
                               Formulation formulation)
    : blur_(&blur), l_(&l), alpha_(alpha), formulation_(formulation) {
  if (l.rows() != static_cast<Eigen::Index>(blur.shape().size())) {
    throw InvalidArgument("SystemOperator: L does not match the blur geometry");
  }
}

void SystemOperator::apply_blur(std::span<const double> w, std::span<double> out) const {
  if (blur_->has_fast_path()) {
    blur_->apply_fast(w, out);
  } else {
    blur_->apply(w, out);
  }
}

void SystemOperator::apply_adjoint(std::span<const double> y, std::span<double> out) const {
  if (formulation_ == Formulation::Reblur) {
    if (blur_->has_fast_path()) {
      blur_->apply_rotated_fast(y, out);
    } else {
      blur_->apply_rotated(y, out);
    }
  } else if (blur_->has_fast_path()) {
    blur_->apply_transpose_fast(y, out);
  } else {
    blur_->apply_transpose(y, out);
  }
}

void SystemOperator::apply(std::span<const double> w, std::span<double> out) const {
  std::vector<double> hw(w.size());
  apply_blur(w, hw);
  apply_adjoint(hw, out);
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  Eigen::Map<Eigen::VectorXd> ov(out.data(), static_cast<Eigen::Index>(out.size()));
  ov.noalias() += alpha_ * (*l_ * wv);
}

ScaledSystem::ScaledSystem(const BlurOperator& blur, const SparseMatrix& l, double alpha,
                           Formulation formulation)
    : base_(blur, l, alpha, formulation), l_(&l) {
  const std::vector<double> d = scaling_diagonal(l, alpha);
  inv_sqrt_d_.resize(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    inv_sqrt_d_[k] = 1.0 / std::sqrt(d[k]);
  }
}

void ScaledSystem::apply(std::span<const double> w, std::span<double> out) const {
  std::vector<double> t(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    t[k] = inv_sqrt_d_[k] * w[k];
  }
  base_.apply(t, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= inv_sqrt_d_[k];
  }
}

void ScaledSystem::apply_h(std::span<const double> w, std::span<double> out) const {
  std::vector<double> t(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    t[k] = inv_sqrt_d_[k] * w[k];
  }
  base_.apply_blur(t, out);
}

void ScaledSystem::apply_l(std::span<const double> w, std::span<double> out) const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) {
    t[static_cast<Eigen::Index>(k)] = inv_sqrt_d_[k] * w[k];
  }
  const Eigen::VectorXd lt = *l_ * t;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = inv_sqrt_d_[k] * lt[static_cast<Eigen::Index>(k)];
  }
}

std::vector<double> ScaledSystem::rhs(std::span<const double> v) const {
  std::vector<double> out(v.size());
  base_.apply_adjoint(v, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= inv_sqrt_d_[k];
  }
  return out;
}

std::vector<double> ScaledSystem::scale(std::span<const double> u) const {
  std::vector<double> out(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    out[k] = u[k] / inv_sqrt_d_[k];
  }
  return out;
}

std::vector<double> ScaledSystem::unscale(std::span<const double> u_tilde) const {
  std::vector<double> out(u_tilde.size());
  for (std::size_t k = 0; k < u_tilde.size(); ++k) {
    out[k] = u_tilde[k] * inv_sqrt_d_[k];
  }
  return out;
}

FpStepResult fp_step(const BlurOperator& blur, std::span<const double> u,
                     std::span<const double> v, const RestorationConfig& config) {
  const Shape shape = blur.shape();
  require_size(u, shape.size(), "fp_step iterate");
  require_size(v, shape.size(), "fp_step data");
  const DiffusionOperator diffusion(u, shape, config.beta, config.bc_l);
  const SparseMatrix l = diffusion.assemble();
  const SystemOperator system(blur, l, config.alpha, config.formulation);
  const LinearMap apply_a = [&](std::span<const double> x, std::span<double> y) {
    system.apply(x, y);
  };

  FpStepResult result;
  switch (config.preconditioner) {
  case PreconditionerChoice::None:
  case PreconditionerChoice::DiagOnly: {
    std::vector<double> rhs(shape.size());
    system.apply_adjoint(v, rhs);
    LinearMap minv;
    std::vector<double> d;
    if (config.preconditioner == PreconditionerChoice::DiagOnly) {
      d = scaling_diagonal(l, config.alpha);
      minv = [&d](std::span<const double> x, std::span<double> y) {
        for (std::size_t k = 0; k < x.size(); ++k) {
          y[k] = x[k] / d[k];
        }
      };
    }
    result.inner = solve(config, apply_a, minv, rhs, u);
    result.next = result.inner.solution;
    break;
  }
  case PreconditionerChoice::Plain:
  case PreconditionerChoice::ScaledOutside: {
    const ScalingVariant variant = config.preconditioner == PreconditionerChoice::Plain
                                       ? ScalingVariant::Plain
                                       : ScalingVariant::ScaledOutside;
    const FactoredPreconditioner x = assemble_preconditioner(
        PreconditionerKind{implied_family(config), variant}, blur, l, config.alpha);
    const LinearMap minv = [&x](std::span<const double> in, std::span<double> out) {
      x.apply_inverse(in, out);
    };
    std::vector<double> rhs(shape.size());
    system.apply_adjoint(v, rhs);
    result.inner = solve(config, apply_a, minv, rhs, u);
    result.next = result.inner.solution;
    break;
  }
  case PreconditionerChoice::ScaledSystem: {
    const ScaledSystem scaled(blur, l, config.alpha, config.formulation);
    const FactoredPreconditioner x =
        assemble_preconditioner(PreconditionerKind{implied_family(config), ScalingVariant::ScaledSystem},
                                blur, l, config.alpha);
    const LinearMap apply_scaled = [&scaled](std::span<const double> in, std::span<double> out) {
      scaled.apply(in, out);
    };
    const LinearMap minv = [&x](std::span<const double> in, std::span<double> out) {
      x.apply_inverse(in, out);
    };
    const std::vector<double> rhs = scaled.rhs(v);
    const std::vector<double> x0 = scaled.scale(u);
    result.inner = solve(config, apply_scaled, minv, rhs, x0);
    result.next = scaled.unscale(result.inner.solution);
    break;
  }
  }
  return result;
}

bool RestorationReport::all_inner_converged() const {
  for (bool c : inner_converged) {
    if (!c) {
      return false;
    }
  }
  return true;
}

RestorationReport restore(std::span<const double> v, const SymmetricPsf& psf,
                          const RestorationConfig& config, std::span<const double> truth) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  RestorationReport report;
  report.shape = shape_for(v.size(), psf.dim());
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidArgument("restore: observed data must be finite");
    }
  }
  if (!truth.empty()) {
    require_size(truth, v.size(), "restore ground truth");
  }
  report.solver = uses_pcg(config) ? "pcg" : "pbicgstab";
  report.preconditioner = preconditioner_label(config);

  const BlurOperator blur(psf, config.bc_h, report.shape.n);
  const bool reblur = config.formulation == Formulation::Reblur;
  std::vector<double> u(v.begin(), v.end());
  try {
    for (int step = 1; step <= config.fp_max; ++step) {
      FpStepResult r = fp_step(blur, u, v, config);
      double diff = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        diff += (r.next[k] - u[k]) * (r.next[k] - u[k]);
      }
      const double scale = norm2(r.next);
      const double change = scale > 0.0 ? std::sqrt(diff) / scale : std::sqrt(diff);
      u = std::move(r.next);
      report.fp_steps = step;
      report.inner_iterations.push_back(r.inner.iterations);
      report.inner_converged.push_back(r.inner.converged);
      report.relative_change.push_back(change);
      report.residual_norms.push_back(
          norm2(el_residual(blur, u, v, config.alpha, config.beta, config.bc_l, reblur)));
      if (!std::isfinite(change)) {
        throw NumericalError("fixed-point iterate is not finite");
      }
      if (change < config.fp_tol) {
        report.fp_converged = true;
        break;
      }
    }
  } catch (const NumericalError& e) {
    report.aborted = true;
    report.failure = e.what();
  }

  if (!report.inner_iterations.empty()) {
    report.average_inner =
        std::accumulate(report.inner_iterations.begin(), report.inner_iterations.end(), 0.0) /
        static_cast<double>(report.inner_iterations.size());
  }
  report.final_residual = report.residual_norms.empty() ? 0.0 : report.residual_norms.back();
  if (!truth.empty()) {
    const double t = norm2(truth);
    if (t > 0.0) {
      double e = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        e += (u[k] - truth[k]) * (u[k] - truth[k]);
      }
      report.rre = std::sqrt(e) / t;
    }
  }
  report.restored = std::move(u);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

} // namespace tvdeblur
