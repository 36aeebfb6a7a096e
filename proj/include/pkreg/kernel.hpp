#pragma once

#include <span>
#include <variant>

#include "pkreg/matrix.hpp"
#include "pkreg/points.hpp"

namespace pkreg::kernel {

/// Polynomial kernel (1 + x.y)^s.
struct PolyKernel {
  int degree = 1;  // s >= 1
};

/// Gaussian kernel exp(-||x-y||^2 / width^2).
struct GaussKernel {
  double width = 1.0;  // > 0
};

using Kernel = std::variant<PolyKernel, GaussKernel>;

/// Integer power by repeated squaring; exact for integer exponents.
double pow_int(double base, int exp);

double poly_eval(const PolyKernel& k, std::span<const double> x, std::span<const double> y);
double gauss_eval(const GaussKernel& k, std::span<const double> x, std::span<const double> y);
double eval(const Kernel& k, std::span<const double> x, std::span<const double> y);

/// Kernel matrix (kernel(rows_i, cols_j))_{i,j}. When rows and cols alias the
/// same point set the result is made exactly symmetric by mirroring.
Matrix kernel_matrix(const Kernel& k, const Points& rows, const Points& cols);

/// Clipping operator: value truncated to [-bound, bound].
double clip(double value, double bound);

}  // namespace pkreg::kernel
