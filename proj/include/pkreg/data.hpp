#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pkreg/points.hpp"

namespace pkreg::data {

/// Two-stage input normalization: per-coordinate affine map into [-1, 1]
/// followed by a global radial rescale into the unit ball.
struct NormalizationRecord {
  std::vector<double> shift;  // per-coordinate midpoint
  std::vector<double> scale;  // per-coordinate half-range; 0 for constant coordinates
  double radial_scale = 1.0;  // divisor applied after the affine map (>= 1)
  bool invertible = true;     // false when some coordinate was constant
};

struct Provenance {
  enum class Kind { Toy, File } kind = Kind::Toy;
  std::uint64_t seed = 0;
  double sigma_sq = 0.0;
  std::string path;
};

struct Dataset {
  Points inputs;
  std::vector<double> targets;
  Provenance provenance;

  std::size_t size() const { return targets.size(); }
  std::size_t dim() const { return inputs.dim; }
};

/// The reference regression function (1-2t)_+^5 (32t^2 + 10t + 1) on [0,1].
double toy_target(double t);

/// m uniform inputs on [0,1] with N(0, sigma_sq) noise on the targets.
Dataset gen_toy(std::size_t m, double sigma_sq, std::uint64_t seed);

/// Noiseless test set: uniform inputs, targets equal to toy_target exactly.
Dataset gen_toy_test(std::size_t m, std::uint64_t seed);

/// Comma-separated decimal floats, last column is the target. Distinct errors
/// for missing files, empty files, ragged rows and non-numeric cells.
Dataset load_csv(const std::string& path, bool has_header);

std::pair<Dataset, NormalizationRecord> normalize_ball(const Dataset& raw);
Points apply_normalization(const NormalizationRecord& rec, const Points& raw);
Points invert_normalization(const NormalizationRecord& rec, const Points& normalized);

/// Deterministic-per-seed random partition without replacement; first part
/// holds round(fraction * m) samples.
std::pair<Dataset, Dataset> split(const Dataset& d, double fraction, std::uint64_t seed);

double rmse(std::span<const double> predictions, std::span<const double> targets);

}  // namespace pkreg::data
