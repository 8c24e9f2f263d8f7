#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvdeblur/errors.hpp"

namespace tvdeblur {

/// Problem geometry: a length-n signal (dim 1) or an n-by-n image (dim 2).
/// Images are stored row-major, entry (i, j) at i * n + j.
struct Shape {
  int dim = 1;
  std::size_t n = 0;

  std::size_t size() const noexcept { return dim == 1 ? n : n * n; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Square row-major image.
struct Grid2D {
  std::size_t n = 0;
  std::vector<double> data;

  Grid2D() = default;
  explicit Grid2D(std::size_t size, double value = 0.0) : n(size), data(size * size, value) {}
  Grid2D(std::size_t size, std::vector<double> values) : n(size), data(std::move(values)) {
    if (data.size() != n * n) {
      throw InvalidArgument("Grid2D: data size is not n*n");
    }
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

inline void require_size(std::span<const double> v, std::size_t expected, const char* what) {
  if (v.size() != expected) {
    throw InvalidArgument(std::string(what) + ": expected length " + std::to_string(expected) +
                          ", got " + std::to_string(v.size()));
  }
}

} // namespace tvdeblur
