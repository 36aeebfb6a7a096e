#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pkreg/errors.hpp"

namespace pkreg {

/// Flat list of points in R^d. Coordinates stored contiguously, point i at
/// [i*dim, (i+1)*dim). The dimension is carried explicitly, never inferred.
struct Points {
  std::size_t dim = 0;
  std::vector<double> coords;

  Points() = default;
  Points(std::size_t d, std::size_t count) : dim(d), coords(d * count, 0.0) {}
  Points(std::size_t d, std::vector<double> flat) : dim(d), coords(std::move(flat)) {
    if (dim == 0 || coords.size() % dim != 0)
      throw DimensionError("point coordinates do not fill a whole number of points");
  }

  std::size_t count() const { return dim == 0 ? 0 : coords.size() / dim; }

  std::span<const double> operator[](std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }
  std::span<double> mutable_point(std::size_t i) { return {coords.data() + i * dim, dim}; }

  void append(std::span<const double> p) {
    if (p.size() != dim) throw DimensionError("appended point has wrong dimension");
    coords.insert(coords.end(), p.begin(), p.end());
  }
};

}  // namespace pkreg
