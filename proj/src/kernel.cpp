#include "pkreg/kernel.hpp"

#include <cmath>

namespace pkreg::kernel {

double pow_int(double base, int exp) {
  double result = 1.0;
  double b = base;
  int e = exp;
  while (e > 0) {
    if (e & 1) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

namespace {

void require_same_dim(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DimensionError("kernel arguments have different dimensions");
}

}  // namespace

double poly_eval(const PolyKernel& k, std::span<const double> x, std::span<const double> y) {
  if (k.degree < 1) throw ConfigError("polynomial kernel degree must be >= 1");
  require_same_dim(x, y);
  return pow_int(1.0 + dot(x, y), k.degree);
}

double gauss_eval(const GaussKernel& k, std::span<const double> x, std::span<const double> y) {
  if (!(k.width > 0.0)) throw ConfigError("gaussian kernel width must be positive");
  require_same_dim(x, y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (k.width * k.width));
}

double eval(const Kernel& k, std::span<const double> x, std::span<const double> y) {
  return std::visit(
      [&](const auto& kk) {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, PolyKernel>)
          return poly_eval(kk, x, y);
        else
          return gauss_eval(kk, x, y);
      },
      k);
}

Matrix kernel_matrix(const Kernel& k, const Points& rows, const Points& cols) {
  if (rows.count() == 0 || cols.count() == 0)
    throw DimensionError("kernel_matrix requires nonempty point lists");
  if (rows.dim != cols.dim)
    throw DimensionError("kernel_matrix point lists have different dimensions");
  const std::size_t m = rows.count();
  const std::size_t n = cols.count();
  Matrix out(m, n);
  const bool same = &rows == &cols || (m == n && rows.coords == cols.coords);
  if (same) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = eval(k, rows[i], cols[j]);
        out(i, j) = v;
        out(j, i) = v;
      }
    }
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) = eval(k, rows[i], cols[j]);
  }
  return out;
}

double clip(double value, double bound) {
  if (!(bound > 0.0)) throw ConfigError("clip bound must be positive");
  if (value > bound) return bound;
  if (value < -bound) return -bound;
  return value;
}

}  // namespace pkreg::kernel
