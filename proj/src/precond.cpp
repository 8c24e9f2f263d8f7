#include "tvdeblur/precond.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "tvdeblur/log.hpp"

namespace tvdeblur {
namespace {

struct Entry {
  long row;
  long col;
  double value;
};

using Entries = std::vector<Entry>;

Entries entries_of(const SparseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument("projection: matrix must be square");
  }
  Entries out;
  out.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      out.push_back({static_cast<long>(it.row()), static_cast<long>(it.col()), it.value()});
    }
  }
  return out;
}

SparseMatrix sparse_of(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument("projection: matrix must be square");
  }
  return SparseMatrix(a.sparseView(0.0, 0.0));
}

// Λ_j = c_j^2 / 2 sum_{t=0}^{n} f_t cos(t (j-1) pi / n), folding diagonal
// sums (k - l) and anti-diagonal sums (k + l + 1, 0-based) onto t.
std::vector<double> cosine_core(std::size_t n, const Entries& entries) {
  if (n == 0) {
    throw InvalidArgument("cosine_project: empty matrix");
  }
  if (n == 1) {
    double s = 0.0;
    for (const Entry& e : entries) {
      s += e.value;
    }
    return {s};
  }
  const long nn = static_cast<long>(n);
  std::vector<double> f(n + 1, 0.0);
  for (const Entry& e : entries) {
    const long d = std::abs(e.row - e.col);
    f[d] += e.value;
    const long t = e.row + e.col + 1;
    f[t <= nn ? t : 2 * nn - t] += e.value;
  }
  std::vector<double> values(n + 1);
  cosine_series(n).evaluate(f, values);
  std::vector<double> lambda(n);
  lambda[0] = values[0] / (2.0 * static_cast<double>(n));
  for (std::size_t j = 1; j < n; ++j) {
    lambda[j] = values[j] / static_cast<double>(n);
  }
  return lambda;
}

// Λ_j = 1/(n+1) sum_{t=0}^{n+1} g_t cos(t j pi / (n+1)), with anti-diagonal
// sums (k + l + 2, 0-based) entering with a minus sign.
std::vector<double> sine_core(std::size_t n, const Entries& entries) {
  if (n == 0) {
    throw InvalidArgument("sine_project: empty matrix");
  }
  const long period = 2 * static_cast<long>(n + 1);
  std::vector<double> g(n + 2, 0.0);
  for (const Entry& e : entries) {
    g[std::abs(e.row - e.col)] += e.value;
    const long t = e.row + e.col + 2;
    g[t <= period / 2 ? t : period - t] -= e.value;
  }
  std::vector<double> values(n + 2);
  cosine_series(n + 1).evaluate(g, values);
  std::vector<double> lambda(n);
  for (std::size_t j = 0; j < n; ++j) {
    lambda[j] = values[j + 1] / static_cast<double>(n + 1);
  }
  return lambda;
}

std::vector<double> sinehat_core(std::size_t n, const Entries& entries) {
  if (n < 3) {
    throw InvalidArgument("sinehat_project: need n >= 3");
  }
  const long last = static_cast<long>(n) - 1;
  double first_corner = 0.0;
  double last_corner = 0.0;
  Entries interior;
  interior.reserve(entries.size());
  for (const Entry& e : entries) {
    if (e.row == 0 && e.col == 0) {
      first_corner += e.value;
    } else if (e.row == last && e.col == last) {
      last_corner += e.value;
    } else if (e.row > 0 && e.row < last && e.col > 0 && e.col < last) {
      interior.push_back({e.row - 1, e.col - 1, e.value});
    }
  }
  const std::vector<double> inner = sine_core(n - 2, interior);
  std::vector<double> lambda(n);
  lambda[0] = first_corner;
  std::copy(inner.begin(), inner.end(), lambda.begin() + 1);
  lambda[n - 1] = last_corner;
  return lambda;
}

ArProjection ar_core(std::size_t n, const Entries& entries) {
  if (n < 5) {
    throw InvalidArgument("ar_project: need n >= 5");
  }
  const long last = static_cast<long>(n) - 1;
  Entries interior;
  interior.reserve(entries.size());
  for (const Entry& e : entries) {
    if (e.row > 0 && e.row < last && e.col > 0 && e.col < last) {
      interior.push_back({e.row - 1, e.col - 1, e.value});
    }
  }
  const std::size_t k = n - 2;
  const std::vector<double> inner = sine_core(k, interior);

  // b = first column of S diag(inner) S; it equals z minus the Hankel part,
  // so z_j = b_j + z_{j+2}.
  const SineTransform& s = sine_transform(k);
  std::vector<double> e1(k, 0.0);
  e1[0] = 1.0;
  std::vector<double> col(k);
  s.apply(e1, col);
  for (std::size_t j = 0; j < k; ++j) {
    col[j] *= inner[j];
  }
  ArProjection out;
  out.z.resize(k);
  s.apply(col, out.z);
  for (std::size_t j = k; j-- > 0;) {
    out.z[j] += j + 2 < k ? out.z[j + 2] : 0.0;
  }

  double tail = 0.0;
  for (std::size_t j = 1; j < k; ++j) {
    tail += out.z[j];
  }
  const double border = out.z[0] + 2.0 * tail;
  out.eigenvalues.resize(n);
  out.eigenvalues[0] = border;
  std::copy(inner.begin(), inner.end(), out.eigenvalues.begin() + 1);
  out.eigenvalues[n - 1] = border;
  return out;
}

std::vector<double> project_entries(AlgebraProjectionKind kind, std::size_t n,
                                    const Entries& entries) {
  switch (kind) {
  case AlgebraProjectionKind::Cosine:
    return cosine_core(n, entries);
  case AlgebraProjectionKind::Sine:
    return sine_core(n, entries);
  case AlgebraProjectionKind::SineHat:
    return sinehat_core(n, entries);
  case AlgebraProjectionKind::AntiReflectiveAlg:
    return ar_core(n, entries).eigenvalues;
  }
  throw InvalidArgument("unknown projection kind");
}

std::string alpha_text(double alpha) {
  std::ostringstream s;
  s << alpha;
  return s.str();
}

} // namespace

TransformKind algebra_transform(AlgebraProjectionKind kind) {
  switch (kind) {
  case AlgebraProjectionKind::Cosine:
    return TransformKind::Dct;
  case AlgebraProjectionKind::Sine:
    return TransformKind::Dst1;
  case AlgebraProjectionKind::SineHat:
    return TransformKind::SineHat;
  case AlgebraProjectionKind::AntiReflectiveAlg:
    return TransformKind::AntiReflective;
  }
  throw InvalidArgument("unknown projection kind");
}

std::vector<double> cosine_project(const SparseMatrix& a) {
  return cosine_core(static_cast<std::size_t>(a.rows()), entries_of(a));
}
std::vector<double> cosine_project(const Eigen::MatrixXd& a) { return cosine_project(sparse_of(a)); }

std::vector<double> sine_project(const SparseMatrix& a) {
  return sine_core(static_cast<std::size_t>(a.rows()), entries_of(a));
}
std::vector<double> sine_project(const Eigen::MatrixXd& a) { return sine_project(sparse_of(a)); }

std::vector<double> sinehat_project(const SparseMatrix& a) {
  return sinehat_core(static_cast<std::size_t>(a.rows()), entries_of(a));
}
std::vector<double> sinehat_project(const Eigen::MatrixXd& a) {
  return sinehat_project(sparse_of(a));
}

Eigen::MatrixXd tau_matrix(std::span<const double> z) {
  const long n = static_cast<long>(z.size());
  // σ²(z) as a 0-based array: x_t = z_{t+2}.
  auto x = [&](long t) { return t + 2 < n ? z[t + 2] : 0.0; };
  Eigen::MatrixXd b(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      const long t = i + j;  // anti-diagonal, 0-based
      const double hankel = t < n ? x(t) : x(2 * n - 2 - t);
      b(i, j) = z[std::abs(i - j)] - hankel;
    }
  }
  return b;
}

TauRepresentation tau_extract_z(const Eigen::MatrixXd& b, double tol) {
  if (b.rows() != b.cols()) {
    throw InvalidArgument("tau_extract_z: matrix must be square");
  }
  const long n = static_cast<long>(b.rows());
  TauRepresentation rep;
  rep.z.assign(static_cast<std::size_t>(n), 0.0);
  for (long k = n - 1; k >= 0; --k) {
    rep.z[k] = b(k, 0) + (k + 2 < n ? rep.z[k + 2] : 0.0);
  }
  const double error = (b - tau_matrix(rep.z)).norm();
  if (error > tol * std::max(1.0, b.norm())) {
    std::ostringstream msg;
    msg << "tau_extract_z: matrix is not in the tau algebra (reconstruction error " << error
        << ")";
    throw ConsistencyError(msg.str());
  }
  return rep;
}

ArProjection ar_project(const SparseMatrix& a) {
  return ar_core(static_cast<std::size_t>(a.rows()), entries_of(a));
}
ArProjection ar_project(const Eigen::MatrixXd& a) { return ar_project(sparse_of(a)); }

Eigen::MatrixXd ar_matrix(std::span<const double> z) {
  const long k = static_cast<long>(z.size());
  const long n = k + 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.block(1, 1, k, k) = tau_matrix(z);
  double tail = 0.0;
  for (long r = k - 1; r >= 0; --r) {
    const double w = z[r] + 2.0 * tail;
    a(r, 0) = w;
    a(n - 1 - r, n - 1) = w;
    tail += z[r];
  }
  return a;
}

std::vector<double> project_1d(AlgebraProjectionKind kind, const SparseMatrix& a) {
  return project_entries(kind, static_cast<std::size_t>(a.rows()), entries_of(a));
}

std::vector<double> level2_project(AlgebraProjectionKind kind, const SparseMatrix& a,
                                   std::size_t n) {
  const long nn = static_cast<long>(n);
  if (a.rows() != nn * nn || a.cols() != nn * nn) {
    throw InvalidArgument("level2_project: matrix must be n^2-by-n^2");
  }
  // Level 1: project every nonzero n-by-n block.
  std::map<std::pair<long, long>, Entries> blocks;
  for (const Entry& e : entries_of(a)) {
    blocks[{e.row / nn, e.col / nn}].push_back({e.row % nn, e.col % nn, e.value});
  }
  std::vector<std::pair<std::pair<long, long>, std::vector<double>>> mu;
  mu.reserve(blocks.size());
  for (const auto& [key, entries] : blocks) {
    mu.emplace_back(key, project_entries(kind, n, entries));
  }
  // Level 2: for each inner frequency q, project the block-index matrix.
  std::vector<double> lambda(n * n);
  Entries slice;
  slice.reserve(mu.size());
  for (std::size_t q = 0; q < n; ++q) {
    slice.clear();
    for (const auto& [key, values] : mu) {
      slice.push_back({key.first, key.second, values[q]});
    }
    const std::vector<double> eig = project_entries(kind, n, slice);
    for (std::size_t p = 0; p < n; ++p) {
      lambda[p * n + q] = eig[p];
    }
  }
  return lambda;
}

std::vector<double> level2_project(AlgebraProjectionKind kind, const Eigen::MatrixXd& a,
                                   std::size_t n) {
  if (n > 32) {
    throw InvalidArgument("level2_project: dense input refused for n > 32");
  }
  return level2_project(kind, sparse_of(a), n);
}

std::vector<double> project(AlgebraProjectionKind kind, const SparseMatrix& a, Shape shape) {
  return shape.dim == 1 ? project_1d(kind, a) : level2_project(kind, a, shape.n);
}

std::string PreconditionerKind::name() const {
  const char* base = family == PreconditionerFamily::R   ? "R"
                     : family == PreconditionerFamily::M ? "M"
                                                         : "P";
  switch (variant) {
  case ScalingVariant::Plain:
    return base;
  case ScalingVariant::ScaledOutside:
    return std::string("D_") + base;
  case ScalingVariant::ScaledSystem:
    return std::string(base) + "_D";
  }
  return base;
}

PreconditionerKind parse_preconditioner_kind(std::string_view name) {
  for (auto family : {PreconditionerFamily::R, PreconditionerFamily::M, PreconditionerFamily::P}) {
    for (auto variant :
         {ScalingVariant::Plain, ScalingVariant::ScaledOutside, ScalingVariant::ScaledSystem}) {
      const PreconditionerKind kind{family, variant};
      if (kind.name() == name) {
        return kind;
      }
    }
  }
  throw InvalidArgument("unknown preconditioner kind '" + std::string(name) + "'");
}

AlgebraProjectionKind family_projection(PreconditionerFamily family) {
  switch (family) {
  case PreconditionerFamily::R:
    return AlgebraProjectionKind::Cosine;
  case PreconditionerFamily::M:
    return AlgebraProjectionKind::SineHat;
  case PreconditionerFamily::P:
    return AlgebraProjectionKind::AntiReflectiveAlg;
  }
  throw InvalidArgument("unknown preconditioner family");
}

BoundaryCondition family_boundary(PreconditionerFamily family) {
  return family == PreconditionerFamily::R ? BoundaryCondition::Reflective
                                           : BoundaryCondition::AntiReflective;
}

FactoredPreconditioner::FactoredPreconditioner(PreconditionerKind kind, TransformKind transform,
                                               Shape shape, std::vector<double> eigenvalues,
                                               std::vector<double> sqrt_scale, double alpha)
    : kind_(kind), transform_(transform), shape_(shape), eigenvalues_(std::move(eigenvalues)),
      sqrt_scale_(std::move(sqrt_scale)) {
  require_size(eigenvalues_, shape.size(), "FactoredPreconditioner eigenvalues");
  if (!sqrt_scale_.empty()) {
    require_size(sqrt_scale_, shape.size(), "FactoredPreconditioner scale");
    for (double d : sqrt_scale_) {
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw InvalidScaling("preconditioner " + kind.name() + ": diagonal scale must be positive");
      }
    }
  }
  double peak = 0.0;
  for (double l : eigenvalues_) {
    if (!std::isfinite(l)) {
      throw IndefinitePreconditioner("preconditioner " + kind.name() +
                                     ": non-finite eigenvalue at alpha=" + alpha_text(alpha));
    }
    peak = std::max(peak, std::abs(l));
  }
  if (peak == 0.0) {
    throw IndefinitePreconditioner("preconditioner " + kind.name() +
                                   ": all eigenvalues vanish at alpha=" + alpha_text(alpha));
  }
  const double floor = 1e-14 * peak;
  for (double& l : eigenvalues_) {
    if (l < -1e-12 * peak) {
      std::ostringstream msg;
      msg << "preconditioner " << kind.name() << ": negative eigenvalue " << l
          << " at alpha=" << alpha;
      throw IndefinitePreconditioner(msg.str());
    }
    if (l < floor) {
      l = floor;
      ++clamped_;
    }
  }
  if (clamped_ > 0) {
    std::ostringstream msg;
    msg << "preconditioner " << kind.name() << ": clamped " << clamped_
        << " eigenvalue(s) to 1e-14 max|lambda| at alpha=" << alpha;
    log_warning(msg.str());
  }
}

void FactoredPreconditioner::apply_inverse(std::span<const double> b, std::span<double> out) const {
  require_size(b, shape_.size(), "FactoredPreconditioner::apply_inverse");
  require_size(out, shape_.size(), "FactoredPreconditioner::apply_inverse");
  std::copy(b.begin(), b.end(), out.begin());
  const bool scaled = !sqrt_scale_.empty();
  if (scaled) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] /= sqrt_scale_[k];
    }
  }
  tvdeblur::transform(transform_, Direction::Inverse, shape_, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] /= eigenvalues_[k];
  }
  tvdeblur::transform(transform_, Direction::Forward, shape_, out);
  if (scaled) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] /= sqrt_scale_[k];
    }
  }
}

void FactoredPreconditioner::apply(std::span<const double> x, std::span<double> out) const {
  require_size(x, shape_.size(), "FactoredPreconditioner::apply");
  require_size(out, shape_.size(), "FactoredPreconditioner::apply");
  std::copy(x.begin(), x.end(), out.begin());
  const bool scaled = !sqrt_scale_.empty();
  if (scaled) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] *= sqrt_scale_[k];
    }
  }
  tvdeblur::transform(transform_, Direction::Inverse, shape_, out);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] *= eigenvalues_[k];
  }
  tvdeblur::transform(transform_, Direction::Forward, shape_, out);
  if (scaled) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] *= sqrt_scale_[k];
    }
  }
}

std::vector<double> FactoredPreconditioner::apply_inverse(std::span<const double> b) const {
  std::vector<double> out(b.size());
  apply_inverse(b, out);
  return out;
}

std::vector<double> FactoredPreconditioner::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  apply(x, out);
  return out;
}

std::vector<double> scaling_diagonal(const SparseMatrix& l, double alpha) {
  std::vector<double> d(static_cast<std::size_t>(l.rows()));
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    d[k] = 1.0 + alpha * l.coeff(k, k);
    if (!(d[k] > 0.0)) {
      throw InvalidScaling("scaling diagonal I + alpha diag(L) is not positive");
    }
  }
  return d;
}

FactoredPreconditioner assemble_preconditioner(PreconditionerKind kind, const BlurOperator& blur,
                                               const SparseMatrix& l, double alpha) {
  if (!(alpha > 0.0)) {
    throw InvalidArgument("assemble_preconditioner: alpha must be positive");
  }
  const Shape shape = blur.shape();
  if (l.rows() != static_cast<Eigen::Index>(shape.size()) || l.cols() != l.rows()) {
    throw InvalidArgument("assemble_preconditioner: L does not match the blur geometry");
  }
  if (blur.boundary() != family_boundary(kind.family)) {
    throw InvalidArgument("preconditioner " + kind.name() + " needs a " +
                          std::string(to_string(family_boundary(kind.family))) + " blur");
  }
  const AlgebraProjectionKind proj = family_projection(kind.family);
  const TransformKind transform_kind = algebra_transform(proj);
  // For an anti-reflective H, ŝ(H) keeps the corners h-hat(0) and the τ
  // interior exactly, so its eigenvalues coincide with those of H.
  const std::span<const double> lambda_h = blur.eigenvalues();
  const std::size_t size = shape.size();

  std::vector<double> eig(size);
  std::vector<double> sqrt_scale;
  if (kind.variant == ScalingVariant::ScaledSystem) {
    const std::vector<double> d = scaling_diagonal(l, alpha);
    std::vector<double> inv_sqrt(size);
    for (std::size_t k = 0; k < size; ++k) {
      inv_sqrt[k] = 1.0 / std::sqrt(d[k]);
    }
    SparseMatrix dmat(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    std::vector<Eigen::Triplet<double>> diag;
    diag.reserve(size);
    for (std::size_t k = 0; k < size; ++k) {
      diag.emplace_back(k, k, inv_sqrt[k]);
    }
    dmat.setFromTriplets(diag.begin(), diag.end());
    const std::vector<double> lambda_d = project(proj, dmat, shape);
    SparseMatrix scaled = l;
    for (Eigen::Index r = 0; r < scaled.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(scaled, r); it; ++it) {
        it.valueRef() *= inv_sqrt[it.row()] * inv_sqrt[it.col()];
      }
    }
    const std::vector<double> lambda_l = project(proj, scaled, shape);
    for (std::size_t k = 0; k < size; ++k) {
      eig[k] = lambda_h[k] * lambda_h[k] * lambda_d[k] * lambda_d[k] + alpha * lambda_l[k];
    }
  } else {
    const std::vector<double> lambda_l = project(proj, l, shape);
    for (std::size_t k = 0; k < size; ++k) {
      eig[k] = lambda_h[k] * lambda_h[k] + alpha * lambda_l[k];
    }
    if (kind.variant == ScalingVariant::ScaledOutside) {
      sqrt_scale = scaling_diagonal(l, alpha);
      for (double& x : sqrt_scale) {
        x = std::sqrt(x);
      }
    }
  }
  return FactoredPreconditioner(kind, transform_kind, shape, std::move(eig), std::move(sqrt_scale),
                                alpha);
}

Eigen::MatrixXd dense_from_action(
    std::size_t size,
    const std::function<void(std::span<const double>, std::span<double>)>& action) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  std::vector<double> e(size, 0.0);
  std::vector<double> col(size);
  for (std::size_t j = 0; j < size; ++j) {
    e[j] = 1.0;
    action(e, col);
    for (std::size_t i = 0; i < size; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    }
    e[j] = 0.0;
  }
  return m;
}

} // namespace tvdeblur
