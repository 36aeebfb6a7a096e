#include "pkreg/centers.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pkreg/kernel.hpp"
#include "pkreg/linalg.hpp"
#include "pkreg/rng.hpp"

namespace pkreg::centers {

std::size_t poly_dim(int s, std::size_t d) {
  if (s < 0) throw ConfigError("poly_dim: degree must be >= 0");
  if (d < 1) throw ConfigError("poly_dim: dimension must be >= 1");
  // C(s+d, d) by iterative multiplication with overflow guard.
  std::size_t result = 1;
  for (std::size_t i = 1; i <= d; ++i) {
    const std::size_t num = static_cast<std::size_t>(s) + i;
    if (result > std::numeric_limits<std::size_t>::max() / num)
      throw ConfigError("poly_dim overflows the count type for s=" + std::to_string(s) +
                        ", d=" + std::to_string(d));
    result = result * num / i;  // exact: C(s+i, i) is divisible step by step
  }
  return result;
}

namespace {

void gaussian_direction(Rng& rng, std::span<double> out) {
  double nn = 0.0;
  do {
    nn = 0.0;
    for (double& v : out) {
      v = rng.normal();
      nn += v * v;
    }
  } while (nn == 0.0);
  const double inv = 1.0 / std::sqrt(nn);
  for (double& v : out) v *= inv;
}

Points draw_uniform_ball(std::size_t d, std::size_t count, Rng& rng) {
  Points pts(d, count);
  for (std::size_t i = 0; i < count; ++i) {
    auto p = pts.mutable_point(i);
    gaussian_direction(rng, p);
    const double r = std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    for (double& v : p) v *= r;
  }
  return pts;
}

Points draw_cube01(std::size_t d, std::size_t count, Rng& rng) {
  // Raw [0,1]^d draws; points leaving the unit ball (possible for d >= 2)
  // are scaled back to the boundary to keep the CenterSet invariant.
  Points pts(d, count);
  for (std::size_t i = 0; i < count; ++i) {
    auto p = pts.mutable_point(i);
    double nn = 0.0;
    for (double& v : p) {
      v = rng.uniform();
      nn += v * v;
    }
    if (nn > 1.0) {
      const double inv = 1.0 / std::sqrt(nn);
      for (double& v : p) v *= inv;
    }
  }
  return pts;
}

Points draw_gaussian_projected(std::size_t d, std::size_t count, Rng& rng) {
  // N(1/2, 1) per coordinate; points outside the ball scaled to the boundary.
  Points pts(d, count);
  for (std::size_t i = 0; i < count; ++i) {
    auto p = pts.mutable_point(i);
    double nn = 0.0;
    for (double& v : p) {
      v = rng.normal(0.5, 1.0);
      nn += v * v;
    }
    if (nn > 1.0) {
      const double inv = 1.0 / std::sqrt(nn);
      for (double& v : p) v *= inv;
    }
  }
  return pts;
}

Points equispaced_unit_interval(std::size_t n) {
  Points pts(1, n);
  if (n == 1) {
    pts.coords[0] = 0.5;
    return pts;
  }
  for (std::size_t j = 0; j < n; ++j)
    pts.coords[j] = static_cast<double>(j) / static_cast<double>(n - 1);
  return pts;
}

struct Verification {
  std::size_t rank = 0;
  double sigma_ratio = 0.0;
};

Verification verify_rank(const Points& pts, int s) {
  const Matrix gram = kernel::kernel_matrix(kernel::PolyKernel{s}, pts, pts);
  const linalg::SvdFactors f = linalg::svd(gram);
  const double cutoff = linalg::pinv_cutoff(gram, f.singulars);
  std::size_t r = 0;
  for (double sv : f.singulars)
    if (sv > cutoff) ++r;
  Verification v;
  v.rank = r;
  const double smax = f.singulars.front();
  v.sigma_ratio = smax > 0.0 ? f.singulars.back() / smax : 0.0;
  return v;
}

}  // namespace

Points sample_uniform_ball(std::size_t d, std::size_t count, std::uint64_t seed) {
  if (d < 1) throw ConfigError("sample_uniform_ball: dimension must be >= 1");
  if (count < 1) throw ConfigError("sample_uniform_ball: count must be >= 1");
  Rng rng(seed);
  return draw_uniform_ball(d, count, rng);
}

Points sample_sphere(std::size_t d, std::size_t count, std::uint64_t seed) {
  if (d < 2) throw ConfigError("sample_sphere: dimension must be >= 2");
  if (count < 1) throw ConfigError("sample_sphere: count must be >= 1");
  Rng rng(seed);
  Points pts(d, count);
  for (std::size_t i = 0; i < count; ++i) gaussian_direction(rng, pts.mutable_point(i));
  return pts;
}

CenterSet build_fundamental_system(int s, std::size_t d, Strategy strategy,
                                   const std::optional<Points>& source, std::uint64_t seed,
                                   int max_retries, UniformDomain domain,
                                   bool require_verified) {
  if (s < 1) throw ConfigError("build_fundamental_system: degree must be >= 1");
  if (d < 1) throw ConfigError("build_fundamental_system: dimension must be >= 1");
  const std::size_t n = poly_dim(s, d);

  if (strategy == Strategy::Equispaced1d && d != 1)
    throw ConfigError("equispaced centers are only defined for d = 1");
  if (strategy == Strategy::FirstSamples) {
    if (!source) throw ConfigError("first-samples strategy requires a source point list");
    if (source->dim != d) throw DimensionError("center source has wrong dimension");
    if (source->count() < n)
      throw ConfigError("first-samples strategy needs at least " + std::to_string(n) +
                        " source points, got " + std::to_string(source->count()));
  }

  Rng rng(mix_seed(seed, {0x63656e74ULL, static_cast<std::uint64_t>(s), d}));

  Points pts;
  auto draw = [&]() {
    switch (strategy) {
      case Strategy::UniformBall:
        pts = domain == UniformDomain::Ball ? draw_uniform_ball(d, n, rng)
                                            : draw_cube01(d, n, rng);
        break;
      case Strategy::Gaussian:
        pts = draw_gaussian_projected(d, n, rng);
        break;
      case Strategy::Equispaced1d:
        pts = equispaced_unit_interval(n);
        break;
      case Strategy::FirstSamples: {
        pts = Points(d, n);
        std::copy(source->coords.begin(), source->coords.begin() + n * d, pts.coords.begin());
        break;
      }
    }
  };

  draw();
  Verification v = verify_rank(pts, s);
  int attempt = 0;
  while (v.rank < n && attempt < max_retries) {
    ++attempt;
    switch (strategy) {
      case Strategy::UniformBall:
      case Strategy::Gaussian:
        draw();
        break;
      case Strategy::FirstSamples: {
        // Replace the trailing deficit with uniform draws.
        const std::size_t deficit = n - v.rank;
        Points repl = draw_uniform_ball(d, deficit, rng);
        std::copy(repl.coords.begin(), repl.coords.end(),
                  pts.coords.begin() + (n - deficit) * d);
        break;
      }
      case Strategy::Equispaced1d:
        // Deterministic layout; a retry cannot change it.
        attempt = max_retries;
        break;
    }
    v = verify_rank(pts, s);
  }
  if (v.rank < n && require_verified)
    throw NumericalError("fundamental system verification failed after " +
                         std::to_string(attempt) + " retries: rank " + std::to_string(v.rank) +
                         " of " + std::to_string(n) + " (s=" + std::to_string(s) +
                         ", d=" + std::to_string(d) + ")");

  CenterSet cs;
  cs.degree = s;
  cs.dim = d;
  cs.points = std::move(pts);
  cs.verified = v.rank == n;
  cs.strategy = strategy;
  cs.sigma_ratio = v.sigma_ratio;
  return cs;
}

CenterSet draw_candidate_centers(int s, std::size_t d, Strategy strategy,
                                 const std::optional<Points>& source, std::uint64_t seed,
                                 UniformDomain domain) {
  // Gram conditioning grows exponentially with s; around s ~ 24 every draw
  // fails the pinv-cutoff rank check and retrying cannot help.
  const int retries = s <= 24 ? 64 : 1;
  return build_fundamental_system(s, d, strategy, source, seed, retries, domain,
                                  /*require_verified=*/false);
}

}  // namespace pkreg::centers
