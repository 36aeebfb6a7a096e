#pragma once

#include <cstdint>
#include <optional>

#include "pkreg/points.hpp"

namespace pkreg::centers {

enum class Strategy { UniformBall, FirstSamples, Equispaced1d, Gaussian };

/// Domain for the uniform strategy: the unit ball (default) or the raw
/// [0,1]^d cube.
enum class UniformDomain { Ball, Cube01 };

/// A candidate basis-center set for the degree-s polynomial kernel.
/// n = C(s+d, d) points inside the closed unit ball; `verified` means the
/// n x n kernel matrix at the centers reached full rank at the pinv cutoff.
struct CenterSet {
  int degree = 1;
  std::size_t dim = 1;
  Points points;
  bool verified = false;
  Strategy strategy = Strategy::UniformBall;
  double sigma_ratio = 0.0;  // sigma_min / sigma_max of the verification matrix
};

/// Dimension of the degree-<=s polynomials in d variables: C(s+d, d).
std::size_t poly_dim(int s, std::size_t d);

/// i.i.d. uniform points in the closed unit ball of R^d
/// (gaussian direction scaled by U^{1/d}).
Points sample_uniform_ball(std::size_t d, std::size_t count, std::uint64_t seed);

/// i.i.d. uniform points on the unit sphere S^{d-1}, d >= 2.
Points sample_sphere(std::size_t d, std::size_t count, std::uint64_t seed);

/// Draw and verify a fundamental system of n = C(s+d, d) centers. On rank
/// deficiency the draw is retried (uniform/gaussian: fresh sample;
/// first-samples: the trailing deficit is replaced by uniform draws) up to
/// max_retries times.
///
/// For large s the kernel matrix at the centers falls below full rank at the
/// pinv cutoff even though the system is exactly independent (the basis
/// conditioning exceeds double precision around s ~ 28 in d = 1). With
/// require_verified = false the set is returned anyway, flagged
/// verified = false, and fits go through pseudo-inverse truncation.
CenterSet build_fundamental_system(int s, std::size_t d, Strategy strategy,
                                   const std::optional<Points>& source, std::uint64_t seed,
                                   int max_retries = 256,
                                   UniformDomain domain = UniformDomain::Ball,
                                   bool require_verified = true);

/// Center draw for grid scoring and sweeps: full retries while the rank check
/// is informative (degenerate draws get resampled), a single accepted draw
/// past the degree where the check saturates at the conditioning limit.
CenterSet draw_candidate_centers(int s, std::size_t d, Strategy strategy,
                                 const std::optional<Points>& source, std::uint64_t seed,
                                 UniformDomain domain = UniformDomain::Ball);

}  // namespace pkreg::centers
