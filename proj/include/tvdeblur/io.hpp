#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tvdeblur {

/// 8-bit binary greymap (PGM P5).
struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int maxval = 255;
  std::vector<std::uint8_t> pixels;  // row-major

  friend bool operator==(const PgmImage&, const PgmImage&) = default;
};

void write_pgm(std::ostream& out, const PgmImage& image);
PgmImage read_pgm(std::istream& in);
void write_pgm_file(const std::filesystem::path& path, const PgmImage& image);
PgmImage read_pgm_file(const std::filesystem::path& path);

/// Affine map [lo, hi] -> [0, 255], rounded and clipped.
PgmImage to_pgm(std::span<const double> values, std::size_t n, double lo, double hi);
std::vector<double> from_pgm(const PgmImage& image, double lo, double hi);

/// Round-trip-exact decimal text for a double.
std::string format_double(double x);
/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Two-column CSV with header "x,u".
void write_signal_csv(std::ostream& out, std::span<const double> x, std::span<const double> u);
void read_signal_csv(std::istream& in, std::vector<double>& x, std::vector<double>& u);

/// One value per line (1D) or n comma-separated rows (2D).
void write_values_csv(std::ostream& out, std::span<const double> values, std::size_t row_length);
std::vector<double> read_values_csv(std::istream& in);

} // namespace tvdeblur
