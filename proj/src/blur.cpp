#include "tvdeblur/blur.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tvdeblur {

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
  case BoundaryCondition::ZeroDirichlet:
    return "zero";
  case BoundaryCondition::Periodic:
    return "periodic";
  case BoundaryCondition::Reflective:
    return "reflective";
  case BoundaryCondition::AntiReflective:
    return "antireflective";
  }
  return "?";
}

BoundaryCondition parse_boundary(std::string_view name) {
  if (name == "zero" || name == "dirichlet" || name == "zero-dirichlet") {
    return BoundaryCondition::ZeroDirichlet;
  }
  if (name == "periodic") {
    return BoundaryCondition::Periodic;
  }
  if (name == "reflective" || name == "neumann") {
    return BoundaryCondition::Reflective;
  }
  if (name == "antireflective" || name == "anti-reflective" || name == "ar") {
    return BoundaryCondition::AntiReflective;
  }
  throw InvalidArgument("unknown boundary condition '" + std::string(name) + "'");
}

Extension extend_index(BoundaryCondition bc, long n, long k) {
  Extension e;
  if (k >= 0 && k < n) {
    e.index[0] = k;
    e.weight[0] = 1.0;
    e.count = 1;
    return e;
  }
  const long dist = k < 0 ? -k : k - (n - 1);
  switch (bc) {
  case BoundaryCondition::ZeroDirichlet:
    return e;
  case BoundaryCondition::Periodic:
    if (dist > n) {
      break;
    }
    e.index[0] = k < 0 ? k + n : k - n;
    e.weight[0] = 1.0;
    e.count = 1;
    return e;
  case BoundaryCondition::Reflective:
    if (dist > n) {
      break;
    }
    e.index[0] = k < 0 ? -k - 1 : 2 * n - 1 - k;
    e.weight[0] = 1.0;
    e.count = 1;
    return e;
  case BoundaryCondition::AntiReflective:
    if (dist > n - 1) {
      break;
    }
    e.index[0] = k < 0 ? 0 : n - 1;
    e.weight[0] = 2.0;
    e.index[1] = k < 0 ? -k : 2 * n - 2 - k;
    e.weight[1] = -1.0;
    e.count = 2;
    return e;
  }
  throw InvalidArgument("extension reaches beyond the opposite boundary (PSF too wide for n)");
}

std::vector<double> pad_signal(std::span<const double> u, std::size_t m, BoundaryCondition bc) {
  const long n = static_cast<long>(u.size());
  const long mm = static_cast<long>(m);
  std::vector<double> padded(u.size() + 2 * m);
  for (long k = -mm; k < n + mm; ++k) {
    const Extension e = extend_index(bc, n, k);
    double s = 0.0;
    for (int t = 0; t < e.count; ++t) {
      s += e.weight[t] * u[e.index[t]];
    }
    padded[k + mm] = s;
  }
  return padded;
}

std::vector<double> pad_image(std::span<const double> u, std::size_t n, std::size_t m,
                              BoundaryCondition bc) {
  require_size(u, n * n, "pad_image");
  const long nn = static_cast<long>(n);
  const long mm = static_cast<long>(m);
  const std::size_t w = n + 2 * m;
  std::vector<Extension> ext(w);
  for (long k = -mm; k < nn + mm; ++k) {
    ext[k + mm] = extend_index(bc, nn, k);
  }
  std::vector<double> padded(w * w);
  for (std::size_t a = 0; a < w; ++a) {
    const Extension& ea = ext[a];
    for (std::size_t b = 0; b < w; ++b) {
      const Extension& eb = ext[b];
      double s = 0.0;
      for (int t = 0; t < ea.count; ++t) {
        for (int r = 0; r < eb.count; ++r) {
          s += ea.weight[t] * eb.weight[r] * u[ea.index[t] * nn + eb.index[r]];
        }
      }
      padded[a * w + b] = s;
    }
  }
  return padded;
}

std::vector<double> eigenvalue_grid(BoundaryCondition bc, std::size_t n) {
  std::vector<double> y(n);
  const double pi = std::numbers::pi;
  if (bc == BoundaryCondition::Reflective) {
    for (std::size_t j = 0; j < n; ++j) {
      y[j] = static_cast<double>(j) * pi / static_cast<double>(n);
    }
    return y;
  }
  if (bc == BoundaryCondition::AntiReflective) {
    if (n < 3) {
      throw InvalidArgument("anti-reflective eigenvalues need n >= 3");
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
      y[j] = static_cast<double>(j) * pi / static_cast<double>(n - 1);
    }
    y[n - 1] = 0.0;
    return y;
  }
  throw UnsupportedBoundary("eigenvalues are only available for reflective and "
                            "anti-reflective boundary conditions");
}

std::vector<double> blur_eigenvalues(const SymmetricPsf& psf, BoundaryCondition bc,
                                     std::size_t n) {
  const auto y = eigenvalue_grid(bc, n);
  if (psf.dim() == 1) {
    std::vector<double> lambda(n);
    for (std::size_t j = 0; j < n; ++j) {
      lambda[j] = symbol_eval(psf, y[j]);
    }
    return lambda;
  }
  // The 2D symbol is sum_{ij} h_ij cos(i y1) cos(j y2); tabulate the cosines.
  const long m = static_cast<long>(psf.half_width());
  const std::size_t w = psf.width();
  std::vector<double> cosines(n * w);
  for (std::size_t p = 0; p < n; ++p) {
    for (long i = -m; i <= m; ++i) {
      cosines[p * w + (i + m)] = std::cos(static_cast<double>(i) * y[p]);
    }
  }
  std::vector<double> partial(w);
  std::vector<double> lambda(n * n);
  for (std::size_t p = 0; p < n; ++p) {
    for (long j = -m; j <= m; ++j) {
      double s = 0.0;
      for (long i = -m; i <= m; ++i) {
        s += psf.at(i, j) * cosines[p * w + (i + m)];
      }
      partial[j + m] = s;
    }
    for (std::size_t q = 0; q < n; ++q) {
      double s = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        s += partial[j] * cosines[q * w + j];
      }
      lambda[p * n + q] = s;
    }
  }
  return lambda;
}

BlurOperator::BlurOperator(SymmetricPsf psf, BoundaryCondition bc, std::size_t n)
    : psf_(std::move(psf)), bc_(bc), shape_{psf_.dim(), n} {
  if (n == 0) {
    throw InvalidArgument("BlurOperator: n must be positive");
  }
  if (psf_.half_width() >= n) {
    throw InvalidArgument("BlurOperator: PSF half-width m must be smaller than n");
  }
  const bool fast = (bc == BoundaryCondition::Reflective) ||
                    (bc == BoundaryCondition::AntiReflective && n >= 3);
  if (fast) {
    eigenvalues_ = blur_eigenvalues(psf_, bc, n);
  }
}

TransformKind BlurOperator::transform_kind() const {
  if (bc_ == BoundaryCondition::Reflective) {
    return TransformKind::Dct;
  }
  if (bc_ == BoundaryCondition::AntiReflective) {
    return TransformKind::AntiReflective;
  }
  throw UnsupportedBoundary("no diagonalizing transform for boundary '" +
                            std::string(to_string(bc_)) + "'");
}

std::span<const double> BlurOperator::eigenvalues() const {
  if (eigenvalues_.empty()) {
    throw UnsupportedBoundary("no transform eigenvalues for boundary '" +
                              std::string(to_string(bc_)) + "'");
  }
  return eigenvalues_;
}

void BlurOperator::apply(std::span<const double> u, std::span<double> out) const {
  require_size(u, shape_.size(), "BlurOperator::apply");
  require_size(out, shape_.size(), "BlurOperator::apply");
  const std::size_t n = shape_.n;
  const long m = static_cast<long>(psf_.half_width());
  const auto h = psf_.coefficients();
  if (shape_.dim == 1) {
    const auto padded = pad_signal(u, psf_.half_width(), bc_);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      // v_i = sum_j h_j u_{i-j}; padded index of u_{i-j} is i - j + m.
      for (long j = -m; j <= m; ++j) {
        s += h[j + m] * padded[static_cast<long>(i) - j + m];
      }
      out[i] = s;
    }
    return;
  }
  const auto padded = pad_image(u, n, psf_.half_width(), bc_);
  const std::size_t w = n + 2 * psf_.half_width();
  const std::size_t hw = psf_.width();
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      double s = 0.0;
      for (long j1 = -m; j1 <= m; ++j1) {
        const double* row = &padded[(static_cast<long>(i1) - j1 + m) * w];
        const double* hrow = &h[(j1 + m) * hw];
        for (long j2 = -m; j2 <= m; ++j2) {
          s += hrow[j2 + m] * row[static_cast<long>(i2) - j2 + m];
        }
      }
      out[i1 * n + i2] = s;
    }
  }
}

void BlurOperator::apply_transpose(std::span<const double> y, std::span<double> out) const {
  require_size(y, shape_.size(), "BlurOperator::apply_transpose");
  require_size(out, shape_.size(), "BlurOperator::apply_transpose");
  const std::size_t n = shape_.n;
  const long nn = static_cast<long>(n);
  const long m = static_cast<long>(psf_.half_width());
  const auto h = psf_.coefficients();
  std::fill(out.begin(), out.end(), 0.0);
  if (shape_.dim == 1) {
    // Adjoint of the valid convolution, then adjoint of the padding.
    std::vector<double> z(n + 2 * psf_.half_width(), 0.0);
    for (long i = 0; i < nn; ++i) {
      for (long j = -m; j <= m; ++j) {
        z[i - j + m] += h[j + m] * y[i];
      }
    }
    for (long k = -m; k < nn + m; ++k) {
      const Extension e = extend_index(bc_, nn, k);
      for (int t = 0; t < e.count; ++t) {
        out[e.index[t]] += e.weight[t] * z[k + m];
      }
    }
    return;
  }
  const std::size_t w = n + 2 * psf_.half_width();
  const std::size_t hw = psf_.width();
  std::vector<double> z(w * w, 0.0);
  for (long i1 = 0; i1 < nn; ++i1) {
    for (long i2 = 0; i2 < nn; ++i2) {
      const double yi = y[i1 * nn + i2];
      for (long j1 = -m; j1 <= m; ++j1) {
        double* row = &z[(i1 - j1 + m) * w];
        const double* hrow = &h[(j1 + m) * hw];
        for (long j2 = -m; j2 <= m; ++j2) {
          row[i2 - j2 + m] += hrow[j2 + m] * yi;
        }
      }
    }
  }
  std::vector<Extension> ext(w);
  for (long k = -m; k < nn + m; ++k) {
    ext[k + m] = extend_index(bc_, nn, k);
  }
  for (std::size_t a = 0; a < w; ++a) {
    for (std::size_t b = 0; b < w; ++b) {
      const double zab = z[a * w + b];
      if (zab == 0.0) {
        continue;
      }
      const Extension& ea = ext[a];
      const Extension& eb = ext[b];
      for (int t = 0; t < ea.count; ++t) {
        for (int r = 0; r < eb.count; ++r) {
          out[ea.index[t] * nn + eb.index[r]] += ea.weight[t] * eb.weight[r] * zab;
        }
      }
    }
  }
}

std::vector<double> BlurOperator::apply(std::span<const double> u) const {
  std::vector<double> out(shape_.size());
  apply(u, out);
  return out;
}

std::vector<double> BlurOperator::apply_transpose(std::span<const double> y) const {
  std::vector<double> out(shape_.size());
  apply_transpose(y, out);
  return out;
}

void BlurOperator::apply_fast(std::span<const double> u, std::span<double> out) const {
  require_size(u, shape_.size(), "BlurOperator::apply_fast");
  require_size(out, shape_.size(), "BlurOperator::apply_fast");
  const TransformKind kind = transform_kind();
  if (u.data() != out.data()) {
    std::copy(u.begin(), u.end(), out.begin());
  }
  transform(kind, Direction::Inverse, shape_, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= eigenvalues_[k];
  }
  transform(kind, Direction::Forward, shape_, out);
}

void BlurOperator::apply_transpose_fast(std::span<const double> y, std::span<double> out) const {
  require_size(y, shape_.size(), "BlurOperator::apply_transpose_fast");
  require_size(out, shape_.size(), "BlurOperator::apply_transpose_fast");
  const TransformKind kind = transform_kind();
  if (kind == TransformKind::Dct) {
    apply_fast(y, out);  // symmetric
    return;
  }
  if (y.data() != out.data()) {
    std::copy(y.begin(), y.end(), out.begin());
  }
  // (T Λ T^{-1})^T = T^{-T} Λ T^T
  transform_transposed(kind, Direction::Forward, shape_, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= eigenvalues_[k];
  }
  transform_transposed(kind, Direction::Inverse, shape_, out);
}

Eigen::MatrixXd dense_blur_matrix(const SymmetricPsf& psf, BoundaryCondition bc, std::size_t n) {
  const std::size_t unknowns = psf.dim() == 1 ? n : n * n;
  if (unknowns > 256) {
    throw InvalidArgument("dense_blur_matrix: refusing more than 256 unknowns (oracle only)");
  }
  if (psf.half_width() >= n) {
    throw InvalidArgument("dense_blur_matrix: PSF half-width must be smaller than n");
  }
  const long nn = static_cast<long>(n);
  const long m = static_cast<long>(psf.half_width());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(unknowns),
                                            static_cast<Eigen::Index>(unknowns));
  if (psf.dim() == 1) {
    for (long i = 0; i < nn; ++i) {
      for (long j = -m; j <= m; ++j) {
        const Extension e = extend_index(bc, nn, i - j);
        for (int t = 0; t < e.count; ++t) {
          a(i, e.index[t]) += psf.at(j) * e.weight[t];
        }
      }
    }
    return a;
  }
  for (long i1 = 0; i1 < nn; ++i1) {
    for (long i2 = 0; i2 < nn; ++i2) {
      const long row = i1 * nn + i2;
      for (long j1 = -m; j1 <= m; ++j1) {
        const Extension e1 = extend_index(bc, nn, i1 - j1);
        for (long j2 = -m; j2 <= m; ++j2) {
          const Extension e2 = extend_index(bc, nn, i2 - j2);
          const double hij = psf.at(j1, j2);
          for (int t = 0; t < e1.count; ++t) {
            for (int r = 0; r < e2.count; ++r) {
              a(row, e1.index[t] * nn + e2.index[r]) += hij * e1.weight[t] * e2.weight[r];
            }
          }
        }
      }
    }
  }
  return a;
}

} // namespace tvdeblur
