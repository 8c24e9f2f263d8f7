#include "tvdeblur/tv.hpp"

#include <cmath>
#include <string>

namespace tvdeblur {
namespace {

BoundaryCondition extension_rule(DiffusionBoundary bc) {
  return bc == DiffusionBoundary::ZeroNeumann ? BoundaryCondition::Reflective
                                              : BoundaryCondition::AntiReflective;
}

double extended_1d(std::span<const double> u, BoundaryCondition rule, long k) {
  const Extension e = extend_index(rule, static_cast<long>(u.size()), k);
  double s = 0.0;
  for (int t = 0; t < e.count; ++t) {
    s += e.weight[t] * u[e.index[t]];
  }
  return s;
}

double extended_2d(std::span<const double> u, long n, BoundaryCondition rule, long i, long j) {
  const Extension ei = extend_index(rule, n, i);
  const Extension ej = extend_index(rule, n, j);
  double s = 0.0;
  for (int t = 0; t < ei.count; ++t) {
    for (int r = 0; r < ej.count; ++r) {
      s += ei.weight[t] * ej.weight[r] * u[ei.index[t] * n + ej.index[r]];
    }
  }
  return s;
}

} // namespace

std::string_view to_string(DiffusionBoundary bc) {
  return bc == DiffusionBoundary::ZeroNeumann ? "neumann" : "antireflective";
}

DiffusionBoundary parse_diffusion_boundary(std::string_view name) {
  if (name == "neumann" || name == "zn" || name == "zero-neumann") {
    return DiffusionBoundary::ZeroNeumann;
  }
  if (name == "antireflective" || name == "anti-reflective" || name == "ar") {
    return DiffusionBoundary::AntiReflective;
  }
  throw InvalidArgument("unknown diffusion boundary '" + std::string(name) + "'");
}

DiffusionOperator::DiffusionOperator(std::span<const double> u, Shape shape, double beta,
                                     DiffusionBoundary bc)
    : shape_(shape), beta_(beta), bc_(bc) {
  if (!(beta > 0.0)) {
    throw InvalidArgument("DiffusionOperator: beta must be positive");
  }
  if (shape.n < 2) {
    throw InvalidArgument("DiffusionOperator: need at least two samples per axis");
  }
  require_size(u, shape.size(), "DiffusionOperator");
  const BoundaryCondition rule = extension_rule(bc);
  const long n = static_cast<long>(shape.n);
  const double b2 = beta * beta;
  if (shape.dim == 1) {
    horizontal_.resize(shape.n + 1);
    for (long k = 0; k <= n; ++k) {
      const double d = extended_1d(u, rule, k) - extended_1d(u, rule, k - 1);
      horizontal_[k] = 1.0 / std::sqrt(d * d + b2);
    }
    return;
  }
  auto val = [&](long i, long j) { return extended_2d(u, n, rule, i, j); };
  horizontal_.resize(shape.n * (shape.n + 1));
  for (long i = 0; i < n; ++i) {
    for (long k = 0; k <= n; ++k) {
      const double dx = val(i, k) - val(i, k - 1);
      const double dy =
          0.25 * ((val(i + 1, k - 1) - val(i - 1, k - 1)) + (val(i + 1, k) - val(i - 1, k)));
      horizontal_[i * (n + 1) + k] = 1.0 / std::sqrt(dx * dx + dy * dy + b2);
    }
  }
  vertical_.resize((shape.n + 1) * shape.n);
  for (long k = 0; k <= n; ++k) {
    for (long j = 0; j < n; ++j) {
      const double dy = val(k, j) - val(k - 1, j);
      const double dx =
          0.25 * ((val(k - 1, j + 1) - val(k - 1, j - 1)) + (val(k, j + 1) - val(k, j - 1)));
      vertical_[k * n + j] = 1.0 / std::sqrt(dx * dx + dy * dy + b2);
    }
  }
}

std::span<const double> DiffusionOperator::coefficients() const {
  if (shape_.dim != 1) {
    throw InvalidArgument("coefficients(): 1D operator only; use horizontal()/vertical()");
  }
  return horizontal_;
}

std::span<const double> DiffusionOperator::horizontal() const { return horizontal_; }
std::span<const double> DiffusionOperator::vertical() const { return vertical_; }

void DiffusionOperator::apply(std::span<const double> w, std::span<double> out) const {
  require_size(w, shape_.size(), "DiffusionOperator::apply");
  require_size(out, shape_.size(), "DiffusionOperator::apply");
  const BoundaryCondition rule = extension_rule(bc_);
  const long n = static_cast<long>(shape_.n);
  if (shape_.dim == 1) {
    for (long i = 0; i < n; ++i) {
      const double wi = w[i];
      out[i] = horizontal_[i + 1] * (wi - extended_1d(w, rule, i + 1)) +
               horizontal_[i] * (wi - extended_1d(w, rule, i - 1));
    }
    return;
  }
  auto val = [&](long i, long j) {
    if (i >= 0 && i < n && j >= 0 && j < n) {
      return w[i * n + j];
    }
    return extended_2d(w, n, rule, i, j);
  };
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const double wij = w[i * n + j];
      out[i * n + j] = horizontal_[i * (n + 1) + j + 1] * (wij - val(i, j + 1)) +
                       horizontal_[i * (n + 1) + j] * (wij - val(i, j - 1)) +
                       vertical_[(i + 1) * n + j] * (wij - val(i + 1, j)) +
                       vertical_[i * n + j] * (wij - val(i - 1, j));
    }
  }
}

std::vector<double> DiffusionOperator::apply(std::span<const double> w) const {
  std::vector<double> out(shape_.size());
  apply(w, out);
  return out;
}

SparseMatrix DiffusionOperator::assemble() const {
  const BoundaryCondition rule = extension_rule(bc_);
  const long n = static_cast<long>(shape_.n);
  const auto size = static_cast<Eigen::Index>(shape_.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(shape_.size() * (shape_.dim == 1 ? 4 : 8));

  // One edge term a (w_row - w_neighbor); neighbor index k along one axis.
  auto add_edge = [&](long row, double a, long k, auto&& flat_index) {
    triplets.emplace_back(row, row, a);
    const Extension e = extend_index(rule, n, k);
    for (int t = 0; t < e.count; ++t) {
      triplets.emplace_back(row, flat_index(e.index[t]), -a * e.weight[t]);
    }
  };

  if (shape_.dim == 1) {
    for (long i = 0; i < n; ++i) {
      auto idx = [](long k) { return k; };
      add_edge(i, horizontal_[i + 1], i + 1, idx);
      add_edge(i, horizontal_[i], i - 1, idx);
    }
  } else {
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        const long row = i * n + j;
        auto along_row = [&](long k) { return i * n + k; };
        auto along_col = [&](long k) { return k * n + j; };
        add_edge(row, horizontal_[i * (n + 1) + j + 1], j + 1, along_row);
        add_edge(row, horizontal_[i * (n + 1) + j], j - 1, along_row);
        add_edge(row, vertical_[(i + 1) * n + j], i + 1, along_col);
        add_edge(row, vertical_[i * n + j], i - 1, along_col);
      }
    }
  }
  SparseMatrix l(size, size);
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.prune(0.0);
  return l;
}

std::vector<double> DiffusionOperator::diagonal() const {
  const SparseMatrix l = assemble();
  std::vector<double> d(shape_.size());
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    d[k] = l.coeff(k, k);
  }
  return d;
}

std::vector<double> diffusion_coefficients(std::span<const double> u, double beta,
                                           DiffusionBoundary bc) {
  DiffusionOperator op(u, Shape{1, u.size()}, beta, bc);
  const auto a = op.coefficients();
  return {a.begin(), a.end()};
}

std::vector<double> el_residual(const BlurOperator& blur, std::span<const double> u,
                                std::span<const double> v, double alpha, double beta,
                                DiffusionBoundary bc, bool reblur) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument("el_residual: alpha must be positive");
  }
  const Shape shape = blur.shape();
  require_size(u, shape.size(), "el_residual");
  require_size(v, shape.size(), "el_residual");
  std::vector<double> r = blur.apply(u);
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k] -= v[k];
  }
  std::vector<double> g = reblur ? blur.apply_rotated(r) : blur.apply_transpose(r);
  const DiffusionOperator l(u, shape, beta, bc);
  const auto lu = l.apply(u);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] += alpha * lu[k];
  }
  return g;
}

} // namespace tvdeblur
