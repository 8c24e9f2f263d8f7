#include "tvdeblur/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tvdeblur/errors.hpp"

namespace tvdeblur {
namespace {

// Next header token of a PNM file, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') {
        c = in.get();
      }
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') {
    in.unget();
  }
  if (token.empty()) {
    throw InvalidArgument("PGM: truncated header");
  }
  return token;
}

long parse_long(const std::string& s, const char* what) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument(std::string("PGM: bad ") + what + " '" + s + "'");
  }
  return value;
}

double parse_double(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  const auto last = s.find_last_not_of(" \t\r\"");
  if (first == std::string::npos) {
    throw InvalidArgument("CSV: empty numeric field");
  }
  s = s.substr(first, last - first + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("CSV: bad number '" + s + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        field.push_back('"');
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

} // namespace

void write_pgm(std::ostream& out, const PgmImage& image) {
  if (image.pixels.size() != image.width * image.height) {
    throw InvalidArgument("PGM: pixel count does not match width*height");
  }
  if (image.maxval < 1 || image.maxval > 255) {
    throw InvalidArgument("PGM: only 8-bit images are supported");
  }
  out << "P5\n" << image.width << ' ' << image.height << '\n' << image.maxval << '\n';
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) {
    throw std::runtime_error("PGM: write failed");
  }
}

PgmImage read_pgm(std::istream& in) {
  if (pnm_token(in) != "P5") {
    throw InvalidArgument("PGM: not a binary greymap (P5)");
  }
  PgmImage image;
  const long w = parse_long(pnm_token(in), "width");
  const long h = parse_long(pnm_token(in), "height");
  const long maxval = parse_long(pnm_token(in), "maxval");
  if (w <= 0 || h <= 0) {
    throw InvalidArgument("PGM: nonpositive size");
  }
  if (maxval < 1 || maxval > 255) {
    throw InvalidArgument("PGM: only 8-bit images are supported");
  }
  image.width = static_cast<std::size_t>(w);
  image.height = static_cast<std::size_t>(h);
  image.maxval = static_cast<int>(maxval);
  image.pixels.resize(image.width * image.height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    throw InvalidArgument("PGM: truncated pixel data");
  }
  return image;
}

void write_pgm_file(const std::filesystem::path& path, const PgmImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  write_pgm(out, image);
}

PgmImage read_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return read_pgm(in);
}

PgmImage to_pgm(std::span<const double> values, std::size_t n, double lo, double hi) {
  if (values.size() != n * n) {
    throw InvalidArgument("to_pgm: expected n*n values");
  }
  if (!(hi > lo)) {
    throw InvalidArgument("to_pgm: empty intensity range");
  }
  PgmImage image;
  image.width = n;
  image.height = n;
  image.pixels.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double t = std::round(255.0 * (values[k] - lo) / (hi - lo));
    image.pixels[k] = static_cast<std::uint8_t>(std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 255.0));
  }
  return image;
}

std::vector<double> from_pgm(const PgmImage& image, double lo, double hi) {
  std::vector<double> out(image.pixels.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = lo + (hi - lo) * image.pixels[k] / static_cast<double>(image.maxval);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) {
    throw std::runtime_error("format_double failed");
  }
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_signal_csv(std::ostream& out, std::span<const double> x, std::span<const double> u) {
  if (x.size() != u.size()) {
    throw InvalidArgument("write_signal_csv: x and u differ in length");
  }
  out << "x,u\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    out << format_double(x[k]) << ',' << format_double(u[k]) << '\n';
  }
}

void read_signal_csv(std::istream& in, std::vector<double>& x, std::vector<double>& u) {
  x.clear();
  u.clear();
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (is_blank(line)) {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (fields.size() == 2 && fields[0] == "x") {
        continue;
      }
    }
    if (fields.size() != 2) {
      throw InvalidArgument("signal CSV: expected two columns");
    }
    x.push_back(parse_double(fields[0]));
    u.push_back(parse_double(fields[1]));
  }
}

void write_values_csv(std::ostream& out, std::span<const double> values, std::size_t row_length) {
  if (row_length == 0 || values.size() % row_length != 0) {
    throw InvalidArgument("write_values_csv: bad row length");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    out << format_double(values[k]) << ((k + 1) % row_length == 0 ? '\n' : ',');
  }
}

std::vector<double> read_values_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) {
      continue;
    }
    for (const auto& field : split_csv_line(line)) {
      values.push_back(parse_double(field));
    }
  }
  return values;
}

} // namespace tvdeblur
