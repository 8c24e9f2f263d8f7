#pragma once

// Fast real trigonometric transforms used to diagonalize the blurring
// matrices and preconditioners:
//
//   C_n   [C]_{ij} = sqrt((2 - delta_{j1}) / n) cos((2i - 1)(j - 1) pi / (2n))
//   S_n   [S]_{ij} = sqrt(2 / (n + 1)) sin(i j pi / (n + 1))
//   Ŝ_n   diag(1, S_{n-2}, 1)
//   T_n   anti-reflective transform, T_n = Ŝ_n (I + U), T_n^{-1} = (I - U) Ŝ_n
//
// C_n and S_n are orthogonal; T_n is not. Every transform object is
// immutable after construction and safe to apply from several threads.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tvdeblur/grid.hpp"

namespace tvdeblur {

enum class TransformKind { Dct, Dst1, AntiReflective, SineHat };
enum class Direction { Forward, Inverse };

namespace detail {
class R2RPlan;
}

class SineTransform {
public:
  explicit SineTransform(std::size_t n);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const noexcept { return n_; }
  /// out = S_n in. `in` and `out` may alias.
  void apply(std::span<const double> in, std::span<double> out) const;

private:
  std::size_t n_;
  std::unique_ptr<detail::R2RPlan> plan_;
};

class CosineTransform {
public:
  explicit CosineTransform(std::size_t n);
  ~CosineTransform();
  CosineTransform(const CosineTransform&) = delete;
  CosineTransform& operator=(const CosineTransform&) = delete;

  std::size_t size() const noexcept { return n_; }
  /// out = C_n in (Forward) or C_n^T in (Inverse).
  void apply(std::span<const double> in, std::span<double> out, Direction dir) const;

private:
  std::size_t n_;
  std::unique_ptr<detail::R2RPlan> synthesis_;  // DCT-III
  std::unique_ptr<detail::R2RPlan> analysis_;   // DCT-II
};

/// Evaluates F_k = sum_{t=0}^{N} f_t cos(pi t k / N) for k = 0..N (a DCT-I of
/// N + 1 samples). Used by the optimal-projection formulas.
class CosineSeries {
public:
  explicit CosineSeries(std::size_t intervals);
  ~CosineSeries();
  CosineSeries(const CosineSeries&) = delete;
  CosineSeries& operator=(const CosineSeries&) = delete;

  std::size_t intervals() const noexcept { return n_; }
  void evaluate(std::span<const double> coefficients, std::span<double> values) const;

private:
  std::size_t n_;
  std::unique_ptr<detail::R2RPlan> plan_;
};

/// T_n applied through its rank-2 factorization; the correction columns
/// S_{n-2} p and S_{n-2} J p are computed once at construction.
class AntiReflectiveTransform {
public:
  explicit AntiReflectiveTransform(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  void apply(std::span<const double> in, std::span<double> out, Direction dir) const;
  /// out = T_n^T in (Forward) or T_n^{-T} in (Inverse).
  void apply_transposed(std::span<const double> in, std::span<double> out, Direction dir) const;

  std::span<const double> correction_left() const noexcept { return sp_; }
  std::span<const double> correction_right() const noexcept { return sjp_; }

private:
  void sine_hat(std::span<double> v) const;

  std::size_t n_;
  const SineTransform* interior_;
  std::vector<double> sp_;
  std::vector<double> sjp_;
};

// Process-wide caches keyed by size. The returned references stay valid for
// the lifetime of the program.
const SineTransform& sine_transform(std::size_t n);
const CosineTransform& cosine_transform(std::size_t n);
const CosineSeries& cosine_series(std::size_t intervals);
const AntiReflectiveTransform& anti_reflective_transform(std::size_t n);

std::vector<double> dst1_apply(std::span<const double> v);
std::vector<double> dct_apply(std::span<const double> v, Direction dir);
std::vector<double> ar_apply(std::span<const double> v, Direction dir);
std::vector<double> sinehat_apply(std::span<const double> v);

/// Applies the 1D transform of the given kind. Dst1 and SineHat are
/// involutions, so `dir` is ignored for them. `in` and `out` may alias.
void transform_1d(TransformKind kind, Direction dir, std::span<const double> in,
                  std::span<double> out);
/// Transposed variant (differs from transform_1d only for AntiReflective).
void transform_1d_transposed(TransformKind kind, Direction dir, std::span<const double> in,
                             std::span<double> out);

/// (X ⊗ X) vec(g) for a row-major n-by-n grid, i.e. X g X^T: the 1D
/// transform on every column, then on every row. In place.
void tensor_apply_2d(TransformKind kind, Direction dir, std::size_t n, std::span<double> g);
void tensor_apply_2d_transposed(TransformKind kind, Direction dir, std::size_t n,
                                std::span<double> g);
Grid2D tensor_apply_2d(TransformKind kind, const Grid2D& g, Direction dir);

/// Applies the transform of `kind` in the geometry of `shape` (1D or tensor 2D).
void transform(TransformKind kind, Direction dir, const Shape& shape, std::span<double> v);
void transform_transposed(TransformKind kind, Direction dir, const Shape& shape,
                          std::span<double> v);

} // namespace tvdeblur
