#include "tvdeblur/psf.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tvdeblur/errors.hpp"
#include "tvdeblur/log.hpp"

namespace tvdeblur {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kNormTol = 1e-12;

void normalize(std::vector<double>& h) {
  for (double x : h) {
    if (!std::isfinite(x)) {
      throw InvalidArgument("PSF coefficients must be finite");
    }
  }
  const double sum = std::accumulate(h.begin(), h.end(), 0.0);
  if (std::abs(sum) < 1e-300) {
    throw InvalidArgument("PSF coefficients sum to zero");
  }
  if (std::abs(sum - 1.0) > kNormTol) {
    std::ostringstream msg;
    msg << "PSF sums to " << std::setprecision(17) << sum << "; renormalizing";
    log_warning(msg.str());
    for (double& x : h) {
      x /= sum;
    }
  }
}

double max_abs(const std::vector<double>& h) {
  double s = 0.0;
  for (double x : h) {
    s = std::max(s, std::abs(x));
  }
  return s;
}

} // namespace

SymmetricPsf::SymmetricPsf(int dim, std::size_t m, std::vector<double> h)
    : dim_(dim), m_(m), h_(std::move(h)) {}

SymmetricPsf SymmetricPsf::make_1d(std::vector<double> h) {
  if (h.size() % 2 == 0) {
    throw InvalidArgument("1D PSF needs an odd number of coefficients (2m+1)");
  }
  const std::size_t m = h.size() / 2;
  const double scale = max_abs(h);
  for (std::size_t j = 1; j <= m; ++j) {
    if (std::abs(h[m + j] - h[m - j]) > kSymmetryTol * scale) {
      throw InvalidArgument("1D PSF is not symmetric");
    }
  }
  normalize(h);
  return SymmetricPsf(1, m, std::move(h));
}

SymmetricPsf SymmetricPsf::make_2d(std::size_t m, std::vector<double> h) {
  const std::size_t w = 2 * m + 1;
  if (h.size() != w * w) {
    throw InvalidArgument("2D PSF needs (2m+1)^2 coefficients");
  }
  const double scale = max_abs(h);
  auto at = [&](long i, long j) { return h[(i + m) * w + (j + m)]; };
  const long mm = static_cast<long>(m);
  for (long i = -mm; i <= mm; ++i) {
    for (long j = -mm; j <= mm; ++j) {
      const double ref = at(i, j);
      if (std::abs(at(-i, j) - ref) > kSymmetryTol * scale ||
          std::abs(at(i, -j) - ref) > kSymmetryTol * scale) {
        throw InvalidArgument("2D PSF is not quadrantally symmetric");
      }
    }
  }
  normalize(h);
  return SymmetricPsf(2, m, std::move(h));
}

SymmetricPsf SymmetricPsf::identity(int dim) {
  if (dim == 1) {
    return make_1d({1.0});
  }
  if (dim == 2) {
    return make_2d(0, {1.0});
  }
  throw InvalidArgument("PSF dimension must be 1 or 2");
}

double SymmetricPsf::at(long i) const {
  const long m = static_cast<long>(m_);
  if (i < -m || i > m) {
    return 0.0;
  }
  return h_[static_cast<std::size_t>(i + m)];
}

double SymmetricPsf::at(long i, long j) const {
  const long m = static_cast<long>(m_);
  if (i < -m || i > m || j < -m || j > m) {
    return 0.0;
  }
  return h_[static_cast<std::size_t>((i + m) * (2 * m + 1) + (j + m))];
}

double symbol_eval(const SymmetricPsf& psf, double y) {
  if (psf.dim() != 1) {
    throw InvalidArgument("symbol_eval(psf, y) needs a 1D PSF");
  }
  const long m = static_cast<long>(psf.half_width());
  double s = psf.at(0);
  for (long j = 1; j <= m; ++j) {
    s += 2.0 * psf.at(j) * std::cos(static_cast<double>(j) * y);
  }
  return s;
}

double symbol_eval(const SymmetricPsf& psf, double y1, double y2) {
  if (psf.dim() != 2) {
    throw InvalidArgument("symbol_eval(psf, y1, y2) needs a 2D PSF");
  }
  const long m = static_cast<long>(psf.half_width());
  double s = 0.0;
  for (long i = -m; i <= m; ++i) {
    const double ci = std::cos(static_cast<double>(i) * y1);
    for (long j = -m; j <= m; ++j) {
      s += psf.at(i, j) * ci * std::cos(static_cast<double>(j) * y2);
    }
  }
  return s;
}

SymmetricPsf read_psf(std::istream& in, std::optional<int> dim_hint) {
  long m = -1;
  if (!(in >> m) || m < 0) {
    throw InvalidArgument("PSF file: first token must be a nonnegative half-width m");
  }
  std::vector<double> h;
  double x = 0.0;
  while (in >> x) {
    h.push_back(x);
  }
  if (!in.eof()) {
    throw InvalidArgument("PSF file: malformed coefficient");
  }
  const std::size_t w = 2 * static_cast<std::size_t>(m) + 1;
  const bool fits_1d = h.size() == w;
  const bool fits_2d = h.size() == w * w;
  if (fits_1d && fits_2d) {
    return dim_hint.value_or(1) == 2 ? SymmetricPsf::make_2d(0, h) : SymmetricPsf::make_1d(h);
  }
  if (fits_1d && dim_hint.value_or(1) == 1) {
    return SymmetricPsf::make_1d(std::move(h));
  }
  if (fits_2d && dim_hint.value_or(2) == 2) {
    return SymmetricPsf::make_2d(static_cast<std::size_t>(m), std::move(h));
  }
  throw InvalidArgument("PSF file: coefficient count does not match m");
}

void write_psf(std::ostream& out, const SymmetricPsf& psf) {
  out << psf.half_width() << '\n';
  const auto h = psf.coefficients();
  const std::size_t w = psf.width();
  out << std::setprecision(17);
  if (psf.dim() == 1) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      out << h[k] << '\n';
    }
    return;
  }
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      out << h[i * w + j] << (j + 1 < w ? ' ' : '\n');
    }
  }
}

} // namespace tvdeblur
