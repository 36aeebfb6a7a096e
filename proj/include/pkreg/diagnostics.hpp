#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pkreg/points.hpp"

namespace pkreg::diagnostics {

/// Gamma at integer or half-integer arguments: gamma_half_integer(two_a)
/// evaluates Gamma(two_a / 2) from the closed forms Gamma(k) = (k-1)! and
/// Gamma(1/2) = sqrt(pi) via the recurrence.
double gamma_half_integer(int two_a);

/// Lower-bound formula s! Gamma(d/2) / (2^s Gamma(s + d/2)).
double eig_bound_value(int s, std::size_t d);

struct EigBoundReport {
  int s = 0;
  std::size_t d = 0;
  std::size_t n = 0;
  double observed_min_eig = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Sample n = C(s+d, d) uniform points on S^{d-1}, build ((1 + xi_i . xi_j)^s)
/// and compare its smallest eigenvalue against the bound.
EigBoundReport check_eig_bound(int s, std::size_t d, std::uint64_t seed);

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Chebyshev rule: nodes cos((2k-1)pi/(2N)), uniform weights pi/N.
/// Integrates f against dx/sqrt(1-x^2) on [-1,1], exact for polynomial f of
/// degree <= 2N-1.
Quadrature chebyshev_quadrature(int node_count);

struct NormEquivReport {
  int s = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  /// Mean-square norm of f under the arcsine probability measure on [-1,1]
  /// (the weighted integral divided by its total mass pi).
  double integral_norm = 0.0;
  double quadratic_form = 0.0;  // (1/m) (A c)^T (A c)
  double ratio = 1.0;
  double slack = 0.2;
  bool pass = false;
  std::size_t design_rank = 0;  // column rank of A_{m,n}
};

/// d = 1 empirical check of the sampling norm equivalence: verified centers,
/// random coefficients, m arcsine-distributed samples; the quadratic form is
/// compared against the exact weighted norm (Gauss-Chebyshev, N = s + 1).
NormEquivReport check_norm_equivalence(int s, std::size_t m, std::uint64_t seed,
                                       double slack = 0.2);

struct EigBatterySummary {
  std::vector<EigBoundReport> reports;
  std::size_t violations = 0;
};

struct NormBatterySummary {
  std::vector<NormEquivReport> reports;
  std::size_t passes = 0;
};

EigBatterySummary run_eig_battery(const std::vector<std::pair<std::size_t, int>>& d_s_pairs,
                                  int trials, std::uint64_t seed);
NormBatterySummary run_norm_battery(const std::vector<int>& s_values, int trials,
                                    std::uint64_t seed);

std::string battery_json(const EigBatterySummary& eig, const NormBatterySummary& norm);

}  // namespace pkreg::diagnostics
