#include "tvdeblur/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

namespace tvdeblur {
namespace detail {

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class R2RPlan {
public:
  R2RPlan(std::size_t n, fftw_r2r_kind kind) : n_(n) {
    std::vector<double> scratch(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_r2r_1d(static_cast<int>(n), scratch.data(), scratch.data(), kind,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) {
      throw InvalidArgument("FFTW could not create an r2r plan of size " + std::to_string(n));
    }
  }
  ~R2RPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  R2RPlan(const R2RPlan&) = delete;
  R2RPlan& operator=(const R2RPlan&) = delete;

  // In-place execution on a buffer of length n.
  void execute(double* data) const { fftw_execute_r2r(plan_, data, data); }

private:
  std::size_t n_;
  fftw_plan plan_;
};

} // namespace detail

namespace {

void require_nonempty(std::span<const double> v, const char* what) {
  if (v.empty()) {
    throw InvalidArgument(std::string(what) + ": empty vector");
  }
}

void copy_in(std::span<const double> in, std::span<double> out) {
  if (in.data() != out.data()) {
    std::copy(in.begin(), in.end(), out.begin());
  }
}

template <class T, class... Args>
const T& cached(std::size_t key, Args... args) {
  static std::mutex m;
  static std::map<std::size_t, std::unique_ptr<T>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[key];
  if (!slot) {
    slot = std::make_unique<T>(key, args...);
  }
  return *slot;
}

} // namespace

SineTransform::SineTransform(std::size_t n) : n_(n) {
  if (n == 0) {
    throw InvalidArgument("SineTransform: size must be positive");
  }
  plan_ = std::make_unique<detail::R2RPlan>(n, FFTW_RODFT00);
}

SineTransform::~SineTransform() = default;

void SineTransform::apply(std::span<const double> in, std::span<double> out) const {
  require_size(in, n_, "SineTransform::apply");
  require_size(out, n_, "SineTransform::apply");
  copy_in(in, out);
  plan_->execute(out.data());
  // RODFT00 computes 2 sum_j x_j sin(pi (j+1)(k+1) / (n+1)).
  const double scale = 0.5 * std::sqrt(2.0 / static_cast<double>(n_ + 1));
  for (double& x : out) {
    x *= scale;
  }
}

CosineTransform::CosineTransform(std::size_t n) : n_(n) {
  if (n == 0) {
    throw InvalidArgument("CosineTransform: size must be positive");
  }
  synthesis_ = std::make_unique<detail::R2RPlan>(n, FFTW_REDFT01);
  analysis_ = std::make_unique<detail::R2RPlan>(n, FFTW_REDFT10);
}

CosineTransform::~CosineTransform() = default;

void CosineTransform::apply(std::span<const double> in, std::span<double> out,
                            Direction dir) const {
  require_size(in, n_, "CosineTransform::apply");
  require_size(out, n_, "CosineTransform::apply");
  const double c0 = std::sqrt(1.0 / static_cast<double>(n_));
  const double c1 = std::sqrt(2.0 / static_cast<double>(n_));
  copy_in(in, out);
  if (dir == Direction::Forward) {
    // REDFT01: y_k = x_0 + 2 sum_{j>=1} x_j cos(pi j (k + 1/2) / n).
    out[0] *= c0;
    for (std::size_t j = 1; j < n_; ++j) {
      out[j] *= 0.5 * c1;
    }
    synthesis_->execute(out.data());
  } else {
    // REDFT10: y_k = 2 sum_j x_j cos(pi (j + 1/2) k / n).
    analysis_->execute(out.data());
    out[0] *= 0.5 * c0;
    for (std::size_t j = 1; j < n_; ++j) {
      out[j] *= 0.5 * c1;
    }
  }
}

CosineSeries::CosineSeries(std::size_t intervals) : n_(intervals) {
  if (intervals == 0) {
    throw InvalidArgument("CosineSeries: need at least one interval");
  }
  plan_ = std::make_unique<detail::R2RPlan>(intervals + 1, FFTW_REDFT00);
}

CosineSeries::~CosineSeries() = default;

void CosineSeries::evaluate(std::span<const double> coefficients, std::span<double> values) const {
  require_size(coefficients, n_ + 1, "CosineSeries::evaluate");
  require_size(values, n_ + 1, "CosineSeries::evaluate");
  copy_in(coefficients, values);
  // REDFT00: y_k = x_0 + (-1)^k x_N + 2 sum_{j=1}^{N-1} x_j cos(pi j k / N).
  for (std::size_t j = 1; j < n_; ++j) {
    values[j] *= 0.5;
  }
  plan_->execute(values.data());
}

AntiReflectiveTransform::AntiReflectiveTransform(std::size_t n) : n_(n) {
  if (n < 3) {
    throw InvalidArgument("AntiReflectiveTransform: size must be at least 3");
  }
  const std::size_t m = n - 2;
  interior_ = &sine_transform(m);
  std::vector<double> p(m);
  std::vector<double> jp(m);
  for (std::size_t j = 1; j <= m; ++j) {
    p[j - 1] = 1.0 - static_cast<double>(j) / static_cast<double>(n - 1);
  }
  std::reverse_copy(p.begin(), p.end(), jp.begin());
  sp_.resize(m);
  sjp_.resize(m);
  interior_->apply(p, sp_);
  interior_->apply(jp, sjp_);
}

void AntiReflectiveTransform::sine_hat(std::span<double> v) const {
  interior_->apply(v.subspan(1, n_ - 2), v.subspan(1, n_ - 2));
}

void AntiReflectiveTransform::apply(std::span<const double> in, std::span<double> out,
                                    Direction dir) const {
  require_size(in, n_, "AntiReflectiveTransform::apply");
  require_size(out, n_, "AntiReflectiveTransform::apply");
  copy_in(in, out);
  const std::size_t m = n_ - 2;
  auto interior = out.subspan(1, m);
  if (dir == Direction::Forward) {
    const double first = out[0];
    const double last = out[n_ - 1];
    for (std::size_t k = 0; k < m; ++k) {
      interior[k] += first * sp_[k] + last * sjp_[k];
    }
    sine_hat(out);
  } else {
    sine_hat(out);
    const double first = out[0];
    const double last = out[n_ - 1];
    for (std::size_t k = 0; k < m; ++k) {
      interior[k] -= first * sp_[k] + last * sjp_[k];
    }
  }
}

void AntiReflectiveTransform::apply_transposed(std::span<const double> in, std::span<double> out,
                                               Direction dir) const {
  require_size(in, n_, "AntiReflectiveTransform::apply_transposed");
  require_size(out, n_, "AntiReflectiveTransform::apply_transposed");
  copy_in(in, out);
  const std::size_t m = n_ - 2;
  auto interior = out.subspan(1, m);
  if (dir == Direction::Forward) {
    // T^T = (I + U^T) Ŝ
    sine_hat(out);
    out[0] += std::inner_product(sp_.begin(), sp_.end(), interior.begin(), 0.0);
    out[n_ - 1] += std::inner_product(sjp_.begin(), sjp_.end(), interior.begin(), 0.0);
  } else {
    // T^{-T} = Ŝ (I - U^T)
    out[0] -= std::inner_product(sp_.begin(), sp_.end(), interior.begin(), 0.0);
    out[n_ - 1] -= std::inner_product(sjp_.begin(), sjp_.end(), interior.begin(), 0.0);
    sine_hat(out);
  }
}

const SineTransform& sine_transform(std::size_t n) { return cached<SineTransform>(n); }
const CosineTransform& cosine_transform(std::size_t n) { return cached<CosineTransform>(n); }
const CosineSeries& cosine_series(std::size_t intervals) {
  return cached<CosineSeries>(intervals);
}
const AntiReflectiveTransform& anti_reflective_transform(std::size_t n) {
  if (n < 3) {
    throw InvalidArgument("anti-reflective transform needs n >= 3");
  }
  return cached<AntiReflectiveTransform>(n);
}

std::vector<double> dst1_apply(std::span<const double> v) {
  require_nonempty(v, "dst1_apply");
  std::vector<double> out(v.size());
  sine_transform(v.size()).apply(v, out);
  return out;
}

std::vector<double> dct_apply(std::span<const double> v, Direction dir) {
  require_nonempty(v, "dct_apply");
  std::vector<double> out(v.size());
  cosine_transform(v.size()).apply(v, out, dir);
  return out;
}

std::vector<double> ar_apply(std::span<const double> v, Direction dir) {
  if (v.size() < 3) {
    throw InvalidArgument("ar_apply: length must be at least 3");
  }
  std::vector<double> out(v.size());
  anti_reflective_transform(v.size()).apply(v, out, dir);
  return out;
}

std::vector<double> sinehat_apply(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  transform_1d(TransformKind::SineHat, Direction::Forward, v, out);
  return out;
}

void transform_1d(TransformKind kind, Direction dir, std::span<const double> in,
                  std::span<double> out) {
  const std::size_t n = in.size();
  switch (kind) {
  case TransformKind::Dct:
    require_nonempty(in, "transform_1d");
    cosine_transform(n).apply(in, out, dir);
    return;
  case TransformKind::Dst1:
    require_nonempty(in, "transform_1d");
    sine_transform(n).apply(in, out);
    return;
  case TransformKind::SineHat:
    if (n < 3) {
      throw InvalidArgument("SineHat transform needs n >= 3");
    }
    require_size(out, n, "transform_1d");
    copy_in(in, out);
    sine_transform(n - 2).apply(out.subspan(1, n - 2), out.subspan(1, n - 2));
    return;
  case TransformKind::AntiReflective:
    anti_reflective_transform(n).apply(in, out, dir);
    return;
  }
}

void transform_1d_transposed(TransformKind kind, Direction dir, std::span<const double> in,
                             std::span<double> out) {
  switch (kind) {
  case TransformKind::AntiReflective:
    anti_reflective_transform(in.size()).apply_transposed(in, out, dir);
    return;
  case TransformKind::Dct:
    // C^T is the inverse of C, and (C^T)^T = C.
    transform_1d(kind, dir == Direction::Forward ? Direction::Inverse : Direction::Forward, in,
                 out);
    return;
  default:
    transform_1d(kind, dir, in, out);
    return;
  }
}

namespace {

template <class Apply1D>
void tensor_apply_impl(std::size_t n, std::span<double> g, Apply1D&& apply) {
  require_size(g, n * n, "tensor_apply_2d");
  std::vector<double> column(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = g[i * n + j];
    }
    apply(std::span<const double>(column), std::span<double>(column));
    for (std::size_t i = 0; i < n; ++i) {
      g[i * n + j] = column[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto row = g.subspan(i * n, n);
    apply(std::span<const double>(row), row);
  }
}

} // namespace

void tensor_apply_2d(TransformKind kind, Direction dir, std::size_t n, std::span<double> g) {
  if (n == 0) {
    throw InvalidArgument("tensor_apply_2d: empty grid");
  }
  tensor_apply_impl(n, g, [&](std::span<const double> in, std::span<double> out) {
    transform_1d(kind, dir, in, out);
  });
}

void tensor_apply_2d_transposed(TransformKind kind, Direction dir, std::size_t n,
                                std::span<double> g) {
  if (n == 0) {
    throw InvalidArgument("tensor_apply_2d: empty grid");
  }
  tensor_apply_impl(n, g, [&](std::span<const double> in, std::span<double> out) {
    transform_1d_transposed(kind, dir, in, out);
  });
}

Grid2D tensor_apply_2d(TransformKind kind, const Grid2D& g, Direction dir) {
  if (g.data.size() != g.n * g.n) {
    throw InvalidArgument("tensor_apply_2d: grid is not square");
  }
  Grid2D out = g;
  tensor_apply_2d(kind, dir, g.n, out.data);
  return out;
}

void transform(TransformKind kind, Direction dir, const Shape& shape, std::span<double> v) {
  require_size(v, shape.size(), "transform");
  if (shape.dim == 1) {
    transform_1d(kind, dir, v, v);
  } else {
    tensor_apply_2d(kind, dir, shape.n, v);
  }
}

void transform_transposed(TransformKind kind, Direction dir, const Shape& shape,
                          std::span<double> v) {
  require_size(v, shape.size(), "transform_transposed");
  if (shape.dim == 1) {
    transform_1d_transposed(kind, dir, v, v);
  } else {
    tensor_apply_2d_transposed(kind, dir, shape.n, v);
  }
}

} // namespace tvdeblur
