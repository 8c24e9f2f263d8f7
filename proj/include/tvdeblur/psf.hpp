#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace tvdeblur {

/// Normalized symmetric point spread function.
///
/// 1D: coefficients h_{-m..m}, with h_j = h_{-j}.
/// 2D: coefficients h_{-m..m, -m..m} stored row-major over (i, j), with
/// quadrantal symmetry h_{i,j} = h_{-i,j} = h_{i,-j}.
///
/// Construction validates symmetry and renormalizes (with a logged warning)
/// when the coefficients do not sum to one within 1e-12.
class SymmetricPsf {
public:
  static SymmetricPsf make_1d(std::vector<double> coefficients);
  static SymmetricPsf make_2d(std::size_t half_width, std::vector<double> coefficients);
  static SymmetricPsf identity(int dim);

  int dim() const noexcept { return dim_; }
  std::size_t half_width() const noexcept { return m_; }
  std::size_t width() const noexcept { return 2 * m_ + 1; }
  std::span<const double> coefficients() const noexcept { return h_; }

  /// h_i, |i| <= m.
  double at(long i) const;
  /// h_{i,j}, |i|, |j| <= m.
  double at(long i, long j) const;

private:
  SymmetricPsf(int dim, std::size_t m, std::vector<double> h);
  int dim_;
  std::size_t m_;
  std::vector<double> h_;
};

/// Symbol ĥ(y) = sum_j h_j exp(i j y) = h_0 + 2 sum_{j>=1} h_j cos(j y).
double symbol_eval(const SymmetricPsf& psf, double y);
/// 2D symbol sum_{i,j} h_{ij} cos(i y1) cos(j y2).
double symbol_eval(const SymmetricPsf& psf, double y1, double y2);

/// Plain-text PSF format: first line "m", then the coefficients h_{-m..m}
/// (1D) or the (2m+1)^2 block row-major (2D), whitespace separated.
/// The dimension is inferred from the coefficient count; `dim_hint`
/// disambiguates m = 0.
SymmetricPsf read_psf(std::istream& in, std::optional<int> dim_hint = std::nullopt);
void write_psf(std::ostream& out, const SymmetricPsf& psf);

} // namespace tvdeblur
