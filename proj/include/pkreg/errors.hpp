#pragma once

#include <stdexcept>
#include <string>

namespace pkreg {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched shapes, dimensions or lengths.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Problems with input data: files, parsing, empty sets.
class DataError : public Error {
public:
  using Error::Error;
};

/// Numerical breakdown: non-convergence, residual checks, rank verification.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Invalid parameters or configuration (bad grids, out-of-range arguments).
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace pkreg
