#include "pkreg/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "pkreg/rng.hpp"

namespace pkreg::data {

double toy_target(double t) {
  const double u = std::max(1.0 - 2.0 * t, 0.0);
  const double u2 = u * u;
  return u2 * u2 * u * (32.0 * t * t + 10.0 * t + 1.0);
}

Dataset gen_toy(std::size_t m, double sigma_sq, std::uint64_t seed) {
  if (m < 1) throw ConfigError("gen_toy: m must be >= 1");
  if (!(sigma_sq >= 0.0)) throw ConfigError("gen_toy: sigma_sq must be >= 0");
  Rng rng(seed);
  Dataset d;
  d.inputs = Points(1, m);
  d.targets.resize(m);
  const double sigma = std::sqrt(sigma_sq);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = rng.uniform();
    d.inputs.coords[i] = x;
    d.targets[i] = toy_target(x) + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
  }
  d.provenance = {Provenance::Kind::Toy, seed, sigma_sq, {}};
  return d;
}

Dataset gen_toy_test(std::size_t m, std::uint64_t seed) { return gen_toy(m, 0.0, seed); }

namespace {

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last)
    throw DataError("csv: non-numeric cell at row " + std::to_string(row + 1) + ", column " +
                    std::to_string(col + 1) + ": '" + cell + "'");
  if (!std::isfinite(value))
    throw DataError("csv: non-finite value at row " + std::to_string(row + 1) + ", column " +
                    std::to_string(col + 1));
  return value;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("csv: cannot open file '" + path + "'");

  std::string line;
  std::size_t row = 0;
  std::size_t ncols = 0;
  std::vector<double> flat;
  std::vector<double> targets;
  bool skipped_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      ++row;
      continue;
    }
    if (has_header && !skipped_header) {
      skipped_header = true;
      ++row;
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() < 2)
      throw DataError("csv: row " + std::to_string(row + 1) + " has fewer than 2 columns");
    if (ncols == 0)
      ncols = cells.size();
    else if (cells.size() != ncols)
      throw DataError("csv: ragged row " + std::to_string(row + 1) + " (expected " +
                      std::to_string(ncols) + " columns, got " + std::to_string(cells.size()) +
                      ")");
    for (std::size_t c = 0; c + 1 < ncols; ++c) flat.push_back(parse_cell(cells[c], row, c));
    targets.push_back(parse_cell(cells.back(), row, ncols - 1));
    ++row;
  }
  if (targets.empty()) throw DataError("csv: file '" + path + "' has no data rows");

  Dataset d;
  d.inputs = Points(ncols - 1, std::move(flat));
  d.targets = std::move(targets);
  d.provenance = {Provenance::Kind::File, 0, 0.0, path};
  return d;
}

std::pair<Dataset, NormalizationRecord> normalize_ball(const Dataset& raw) {
  if (raw.size() < 1) throw DataError("normalize_ball: empty dataset");
  const std::size_t d = raw.dim();
  const std::size_t m = raw.size();

  NormalizationRecord rec;
  rec.shift.resize(d);
  rec.scale.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    double lo = raw.inputs[0][c], hi = lo;
    for (std::size_t i = 1; i < m; ++i) {
      lo = std::min(lo, raw.inputs[i][c]);
      hi = std::max(hi, raw.inputs[i][c]);
    }
    rec.shift[c] = 0.5 * (lo + hi);
    rec.scale[c] = 0.5 * (hi - lo);
    if (rec.scale[c] == 0.0) rec.invertible = false;
  }

  Points mapped(d, m);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    auto out = mapped.mutable_point(i);
    double nn = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v =
          rec.scale[c] > 0.0 ? (raw.inputs[i][c] - rec.shift[c]) / rec.scale[c] : 0.0;
      out[c] = v;
      nn += v * v;
    }
    max_norm = std::max(max_norm, std::sqrt(nn));
  }
  rec.radial_scale = max_norm > 1.0 ? max_norm : 1.0;
  if (rec.radial_scale > 1.0)
    for (double& v : mapped.coords) v /= rec.radial_scale;

  Dataset out;
  out.inputs = std::move(mapped);
  out.targets = raw.targets;
  out.provenance = raw.provenance;
  return {std::move(out), std::move(rec)};
}

Points apply_normalization(const NormalizationRecord& rec, const Points& raw) {
  if (raw.dim != rec.shift.size())
    throw DimensionError("apply_normalization: dimension mismatch");
  Points out(raw.dim, raw.count());
  for (std::size_t i = 0; i < raw.count(); ++i) {
    auto o = out.mutable_point(i);
    for (std::size_t c = 0; c < raw.dim; ++c) {
      const double v = rec.scale[c] > 0.0 ? (raw[i][c] - rec.shift[c]) / rec.scale[c] : 0.0;
      o[c] = v / rec.radial_scale;
    }
  }
  return out;
}

Points invert_normalization(const NormalizationRecord& rec, const Points& normalized) {
  if (normalized.dim != rec.shift.size())
    throw DimensionError("invert_normalization: dimension mismatch");
  Points out(normalized.dim, normalized.count());
  for (std::size_t i = 0; i < normalized.count(); ++i) {
    auto o = out.mutable_point(i);
    for (std::size_t c = 0; c < normalized.dim; ++c)
      o[c] = normalized[i][c] * rec.radial_scale * rec.scale[c] + rec.shift[c];
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split: fraction must be in (0, 1)");
  const std::size_t m = d.size();
  const std::size_t n1 = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));
  if (n1 == 0 || n1 == m)
    throw ConfigError("split: a part would be empty (m=" + std::to_string(m) +
                      ", fraction=" + std::to_string(fraction) + ")");

  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = m; i-- > 1;) std::swap(idx[i], idx[rng.index(i + 1)]);

  auto take = [&](std::size_t from, std::size_t to) {
    Dataset part;
    part.inputs = Points(d.dim(), to - from);
    part.targets.resize(to - from);
    for (std::size_t i = from; i < to; ++i) {
      auto src = d.inputs[idx[i]];
      std::copy(src.begin(), src.end(), part.inputs.mutable_point(i - from).begin());
      part.targets[i - from] = d.targets[idx[i]];
    }
    part.provenance = d.provenance;
    return part;
  };
  return {take(0, n1), take(n1, m)};
}

double rmse(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size())
    throw DimensionError("rmse: length mismatch");
  if (predictions.empty()) throw DimensionError("rmse: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(predictions.size()));
}

}  // namespace pkreg::data
