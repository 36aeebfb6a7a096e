#include "pkreg/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pkreg/linalg.hpp"
#include "pkreg/parallel.hpp"
#include "pkreg/rng.hpp"

namespace pkreg::selection {

namespace {

using data::Dataset;
using estimators::Model;
using estimators::Variant;

// Smallest integer k >= 1 with k^e >= m, i.e. ceil(m^{1/e}) for integer m.
int integer_ceil_root(std::size_t m, unsigned e) {
  auto pow_reaches = [&](std::size_t k) {
    unsigned long long acc = 1;
    for (unsigned i = 0; i < e; ++i) {
      if (acc >= m) return true;
      if (acc > m / std::max<std::size_t>(k, 1)) return true;  // would overflow past m
      acc *= k;
    }
    return acc >= m;
  };
  std::size_t k = 1;
  while (!pow_reaches(k)) ++k;
  return static_cast<int>(k);
}

std::vector<double> sorted_unique(std::vector<double> v, const char* what) {
  if (v.empty()) throw ConfigError(std::string("selection grid has no ") + what + " values");
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw ConfigError(std::string("selection grid has duplicate ") + what + " values");
  return v;
}

std::vector<int> sorted_unique(std::vector<int> v, const char* what) {
  if (v.empty()) throw ConfigError(std::string("selection grid has no ") + what + " values");
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw ConfigError(std::string("selection grid has duplicate ") + what + " values");
  return v;
}

struct Fold {
  Dataset train;
  Points val_inputs;
  std::vector<double> val_targets;
};

std::vector<Fold> make_folds(const Dataset& d, int k, std::uint64_t seed) {
  const std::size_t m = d.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(mix_seed(seed, {0x666f6c64ULL}));
  for (std::size_t i = m; i-- > 1;) std::swap(idx[i], idx[rng.index(i + 1)]);

  std::vector<Fold> folds(k);
  for (int f = 0; f < k; ++f) {
    const std::size_t lo = m * static_cast<std::size_t>(f) / static_cast<std::size_t>(k);
    const std::size_t hi = m * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(k);
    Fold& fold = folds[f];
    fold.train.inputs = Points(d.dim(), m - (hi - lo));
    fold.train.targets.reserve(m - (hi - lo));
    fold.train.provenance = d.provenance;
    fold.val_inputs = Points(d.dim(), hi - lo);
    fold.val_targets.reserve(hi - lo);
    std::size_t ti = 0, vi = 0;
    for (std::size_t i = 0; i < m; ++i) {
      auto src = d.inputs[idx[i]];
      if (i >= lo && i < hi) {
        std::copy(src.begin(), src.end(), fold.val_inputs.mutable_point(vi++).begin());
        fold.val_targets.push_back(d.targets[idx[i]]);
      } else {
        std::copy(src.begin(), src.end(), fold.train.inputs.mutable_point(ti++).begin());
        fold.train.targets.push_back(d.targets[idx[i]]);
      }
    }
  }
  return folds;
}

// Evaluate one (outer parameter, fold) cell for every lambda in the grid.
// Kernel-matrix work (and its tridiagonal factorization for the dense ridge
// variants) is shared across the lambda axis.
struct CellResult {
  std::vector<double> scores;        // one per inner candidate
  std::vector<std::string> errors;   // parallel to scores
};

CellResult evaluate_dense_ridge_cell(const Fold& fold, const kernel::Kernel& kk,
                                     const std::vector<double>& lambdas) {
  CellResult out;
  out.scores.assign(lambdas.size(), std::numeric_limits<double>::infinity());
  out.errors.assign(lambdas.size(), "");
  const std::size_t mf = fold.train.size();

  const Matrix ktr = kernel::kernel_matrix(kk, fold.train.inputs, fold.train.inputs);
  const Matrix kval = kernel::kernel_matrix(kk, fold.val_inputs, fold.train.inputs);
  std::optional<linalg::TridiagonalShiftSolver> solver;
  try {
    solver.emplace(ktr);
  } catch (const Error& ex) {
    for (auto& e : out.errors) e = ex.what();
    return out;
  }

  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    try {
      std::vector<double> c;
      if (lambdas[li] > 0.0)
        c = solver->solve(static_cast<double>(mf) * lambdas[li], fold.train.targets);
      else
        c = linalg::pinv_apply(ktr, fold.train.targets);
      // Validation scores use raw predictions, like the protocol being
      // reproduced; clipping stays a prediction-time operation.
      out.scores[li] = data::rmse(kval * c, fold.val_targets);
    } catch (const Error& ex) {
      out.errors[li] = ex.what();
    }
  }
  return out;
}

CellResult evaluate_epkr_cell(const Fold& fold, int s, const std::vector<double>& lambdas,
                              bool cbr, const SelectOptions& opt, std::uint64_t center_seed) {
  CellResult out;
  out.scores.assign(lambdas.size(), std::numeric_limits<double>::infinity());
  out.errors.assign(lambdas.size(), "");
  centers::CenterSet cs;
  estimators::FitOptions fit_opt = opt.fit;
  fit_opt.allow_unverified_centers = true;
  try {
    std::optional<Points> source;
    if (opt.center_strategy == centers::Strategy::FirstSamples) source = fold.train.inputs;
    // Candidates are scored the way the plain algorithm runs: pinv truncation
    // takes over on degrees past verifiable conditioning.
    cs = centers::draw_candidate_centers(s, fold.train.dim(), opt.center_strategy, source,
                                         center_seed, opt.center_domain);
  } catch (const Error& ex) {
    for (auto& e : out.errors) e = ex.what();
    return out;
  }
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    try {
      const Model m = cbr ? estimators::fit_cbr_epkr(fold.train, s, cs, lambdas[li], fit_opt)
                          : estimators::fit_epkr(fold.train, s, cs, fit_opt);
      out.scores[li] = data::rmse(estimators::predict_many(m, fold.val_inputs, false),
                                  fold.val_targets);
    } catch (const Error& ex) {
      out.errors[li] = ex.what();
    }
  }
  return out;
}

struct CandidateGrid {
  // outer axis: s values (polynomial variants) or delta values (gaussian)
  std::vector<int> s_values;
  std::vector<double> delta_values;
  std::vector<double> lambdas;  // {0} placeholder for EPKR (no inner axis)
  Variant method = Variant::Epkr;

  std::size_t outer_count() const {
    return method == Variant::Gkr ? delta_values.size() : s_values.size();
  }
  std::size_t inner_count() const { return lambdas.size(); }
  std::size_t total() const { return outer_count() * inner_count(); }

  CandidateScore describe(std::size_t idx) const {
    CandidateScore c;
    const std::size_t oi = idx / inner_count();
    const std::size_t li = idx % inner_count();
    if (method == Variant::Gkr)
      c.delta = delta_values[oi];
    else
      c.s = s_values[oi];
    if (method != Variant::Epkr) c.lambda = lambdas[li];
    return c;
  }
};

CandidateGrid build_candidates(const SelectionGrid& grid, Variant method) {
  CandidateGrid g;
  g.method = method;
  switch (method) {
    case Variant::Epkr:
      g.s_values = sorted_unique(grid.s_values, "s");
      g.lambdas = {0.0};
      break;
    case Variant::Pkr:
    case Variant::CbrEpkr:
      g.s_values = sorted_unique(grid.s_values, "s");
      g.lambdas = sorted_unique(grid.lambda_values, "lambda");
      break;
    case Variant::Gkr:
      g.delta_values = sorted_unique(grid.delta_values, "delta");
      g.lambdas = sorted_unique(grid.lambda_values, "lambda");
      break;
  }
  return g;
}

Model refit(const Dataset& d, Variant method, const CandidateScore& cand,
            const SelectOptions& opt, std::uint64_t seed) {
  switch (method) {
    case Variant::Epkr:
    case Variant::CbrEpkr: {
      std::optional<Points> source;
      if (opt.center_strategy == centers::Strategy::FirstSamples) source = d.inputs;
      const auto cs = centers::draw_candidate_centers(
          cand.s, d.dim(), opt.center_strategy, source,
          mix_seed(seed, {0x66696e616cULL, static_cast<std::uint64_t>(cand.s)}),
          opt.center_domain);
      estimators::FitOptions fit_opt = opt.fit;
      fit_opt.allow_unverified_centers = true;
      return method == Variant::Epkr ? estimators::fit_epkr(d, cand.s, cs, fit_opt)
                                     : estimators::fit_cbr_epkr(d, cand.s, cs, cand.lambda,
                                                                fit_opt);
    }
    case Variant::Pkr:
      return estimators::fit_pkr(d, cand.s, cand.lambda, opt.fit);
    case Variant::Gkr:
      return estimators::fit_gkr(d, cand.delta, cand.lambda);
  }
  throw ConfigError("unreachable method");
}

SelectionResult select_from_scores(const Dataset& d, const CandidateGrid& g,
                                   std::vector<CandidateScore> scores,
                                   const SelectOptions& opt, std::uint64_t seed) {
  // Winner rule. Scores separated by less than the cross-validation noise
  // count as ties and resolve toward smaller s, then smaller lambda:
  //  - pinv family (EPKR, CBR-EPKR), where the degree is the only capacity
  //    knob and scores across the large-s plateau are statistically
  //    indistinguishable: the smallest degree whose best-over-lambda mean
  //    score lies within one standard error of the overall minimum, then the
  //    score-minimizing lambda at that degree;
  //  - ridge methods (PKR, GKR), whose lambda axis already bounds the
  //    effective capacity: plain minimum with a 1e-9 near-tie preference for
  //    the enumeration order (smaller s/delta, then smaller lambda).
  const std::size_t n_inner = g.inner_count();
  auto near_tie = [](double a, double best) {
    return a <= best + 1e-9 * (1.0 + std::abs(best));
  };
  std::size_t best = scores.size();
  if (g.method == Variant::Gkr || g.method == Variant::Pkr) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!scores[i].error.empty()) continue;
      if (best == scores.size() ||
          (scores[i].score < scores[best].score && !near_tie(scores[best].score, scores[i].score)))
        best = i;
    }
  } else {
    std::size_t argmin = scores.size();
    std::vector<std::size_t> per_s_best(g.outer_count(), scores.size());
    for (std::size_t oi = 0; oi < g.outer_count(); ++oi) {
      for (std::size_t li = 0; li < n_inner; ++li) {
        const std::size_t i = oi * n_inner + li;
        if (!scores[i].error.empty()) continue;
        auto& slot = per_s_best[oi];
        if (slot == scores.size() ||
            (scores[i].score < scores[slot].score && !near_tie(scores[slot].score, scores[i].score)))
          slot = i;
        if (argmin == scores.size() || scores[i].score < scores[argmin].score) argmin = i;
      }
    }
    if (argmin != scores.size()) {
      const double threshold = scores[argmin].score + scores[argmin].score_se +
                               1e-9 * (1.0 + std::abs(scores[argmin].score));
      for (std::size_t oi = 0; oi < g.outer_count(); ++oi) {
        const std::size_t slot = per_s_best[oi];
        if (slot == scores.size()) continue;
        if (scores[slot].score <= threshold) {
          best = slot;
          break;
        }
      }
      if (best == scores.size()) best = argmin;
    }
  }
  if (best == scores.size()) {
    std::string msg = "all candidates failed to fit:";
    for (const auto& c : scores)
      if (!c.error.empty()) msg += "\n  s=" + std::to_string(c.s) + " lambda=" +
                                   std::to_string(c.lambda) + " delta=" +
                                   std::to_string(c.delta) + ": " + c.error;
    throw NumericalError(msg);
  }

  // Refit order: chosen candidate first, then remaining by (score, index).
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a].score < scores[b].score;
  });
  auto it = std::find(order.begin(), order.end(), best);
  std::rotate(order.begin(), it, it + 1);

  SelectionResult result;
  result.seed = seed;
  for (std::size_t oi : order) {
    if (!scores[oi].error.empty()) continue;
    try {
      result.model = refit(d, g.method, scores[oi], opt, seed);
      result.chosen_s = scores[oi].s;
      result.chosen_lambda = scores[oi].lambda;
      result.chosen_delta = scores[oi].delta;
      result.scores = std::move(scores);
      return result;
    } catch (const Error& ex) {
      scores[oi].error = std::string("refit failed: ") + ex.what();
    }
  }
  throw NumericalError("selection: every candidate refit failed");
}

std::vector<CandidateScore> score_over_folds(const std::vector<Fold>& folds,
                                             const CandidateGrid& g, const SelectOptions& opt,
                                             std::uint64_t seed) {
  const std::size_t n_outer = g.outer_count();
  const std::size_t n_inner = g.inner_count();
  const std::size_t n_folds = folds.size();
  std::vector<CellResult> cells(n_outer * n_folds);

  parallel_for(n_outer * n_folds, [&](std::size_t task) {
    const std::size_t oi = task / n_folds;
    const std::size_t fi = task % n_folds;
    const Fold& fold = folds[fi];
    switch (g.method) {
      case Variant::Epkr:
      case Variant::CbrEpkr: {
        const int s = g.s_values[oi];
        const auto center_seed = mix_seed(seed, {0x63656e74ULL, fi, static_cast<std::uint64_t>(s)});
        cells[task] = evaluate_epkr_cell(fold, s, g.lambdas, g.method == Variant::CbrEpkr, opt,
                                         center_seed);
        break;
      }
      case Variant::Pkr:
        cells[task] =
            evaluate_dense_ridge_cell(fold, kernel::PolyKernel{g.s_values[oi]}, g.lambdas);
        break;
      case Variant::Gkr:
        cells[task] =
            evaluate_dense_ridge_cell(fold, kernel::GaussKernel{g.delta_values[oi]}, g.lambdas);
        break;
    }
  });

  std::vector<CandidateScore> scores(g.total());
  for (std::size_t oi = 0; oi < n_outer; ++oi) {
    for (std::size_t li = 0; li < n_inner; ++li) {
      CandidateScore c = g.describe(oi * n_inner + li);
      double sum = 0.0;
      for (std::size_t fi = 0; fi < n_folds; ++fi) {
        const CellResult& cell = cells[oi * n_folds + fi];
        if (!cell.errors[li].empty()) {
          if (!c.error.empty()) c.error += "; ";
          c.error += "fold " + std::to_string(fi) + ": " + cell.errors[li];
        } else {
          sum += cell.scores[li];
        }
      }
      if (c.error.empty()) {
        const double mean = sum / static_cast<double>(n_folds);
        c.score = mean;
        if (n_folds > 1) {
          double var = 0.0;
          for (std::size_t fi = 0; fi < n_folds; ++fi) {
            const double dscore = cells[oi * n_folds + fi].scores[li] - mean;
            var += dscore * dscore;
          }
          c.score_se = std::sqrt(var / static_cast<double>((n_folds - 1) * n_folds));
        }
      }
      scores[oi * n_inner + li] = std::move(c);
    }
  }
  return scores;
}

}  // namespace

int theoretical_degree(std::size_t m, std::size_t d, int r) {
  if (m < 1) throw ConfigError("theoretical_degree: m must be >= 1");
  if (d < 1) throw ConfigError("theoretical_degree: d must be >= 1");
  if (r < 1) throw ConfigError("theoretical_degree: r must be >= 1");
  return integer_ceil_root(m, static_cast<unsigned>(d) + 2 * static_cast<unsigned>(r));
}

double lambda_upper_bound(std::size_t m, std::size_t d, int r) {
  if (m < 1 || d < 1 || r < 1) throw ConfigError("lambda_upper_bound: bad arguments");
  const double dd = static_cast<double>(d);
  const double rr = static_cast<double>(r);
  return std::pow(static_cast<double>(m), -2.0 * rr / (2.0 * rr + dd)) *
         std::pow(4.0 * dd, -1.0 / (dd + 2.0 * rr));
}

SGrid default_s_grid(std::size_t m, std::size_t d, std::optional<int> cap) {
  if (m < 1 || d < 1) throw ConfigError("default_s_grid: bad arguments");
  const int cap_value = cap.value_or(50);
  if (cap_value < 1) throw ConfigError("default_s_grid: cap must be >= 1");
  const int top = std::min(integer_ceil_root(m, static_cast<unsigned>(d)), cap_value);
  SGrid g;
  for (int s = 1; s <= top; ++s) {
    bool fits = true;
    try {
      fits = centers::poly_dim(s, d) <= m;
    } catch (const ConfigError&) {
      fits = false;  // poly_dim overflow certainly exceeds m
    }
    if (fits)
      g.values.push_back(s);
    else
      g.removed.push_back(s);
  }
  if (g.values.empty())
    throw ConfigError("default_s_grid: no degree satisfies poly_dim(s, d) <= m for m=" +
                      std::to_string(m) + ", d=" + std::to_string(d));
  return g;
}

std::vector<double> default_lambda_grid(bool arithmetic) {
  std::vector<double> g(50);
  if (arithmetic) {
    for (int i = 0; i < 50; ++i) g[i] = 1e-5 + 1e-2 * static_cast<double>(i);
  } else {
    for (int i = 0; i < 50; ++i)
      g[i] = std::pow(10.0, -5.0 + 5.0 * static_cast<double>(i) / 49.0);
    g.front() = 1e-5;
    g.back() = 1.0;
  }
  return g;
}

std::vector<double> default_delta_grid() {
  std::vector<double> g(40);
  for (int i = 0; i < 40; ++i) g[i] = 0.01 + 0.025 * static_cast<double>(i);
  return g;
}

SelectionResult kfold_cv(const Dataset& d, const SelectionGrid& grid, Variant method, int k,
                         std::uint64_t seed, const SelectOptions& opt) {
  if (k < 2) throw ConfigError("kfold_cv: k must be >= 2");
  if (d.size() < static_cast<std::size_t>(k))
    throw ConfigError("kfold_cv: fewer samples than folds");
  const CandidateGrid g = build_candidates(grid, method);
  const std::vector<Fold> folds = make_folds(d, k, seed);
  std::vector<CandidateScore> scores = score_over_folds(folds, g, opt, seed);
  return select_from_scores(d, g, std::move(scores), opt, seed);
}

SelectionResult holdout_select(const Dataset& d, const SelectionGrid& grid, Variant method,
                               double split_fraction, std::uint64_t seed,
                               const SelectOptions& opt) {
  const CandidateGrid g = build_candidates(grid, method);
  auto [z1, z2] = data::split(d, split_fraction, mix_seed(seed, {0x686f6c64ULL}));

  std::vector<Fold> folds(1);
  folds[0].train = std::move(z1);
  folds[0].val_inputs = std::move(z2.inputs);
  folds[0].val_targets = std::move(z2.targets);
  std::vector<CandidateScore> scores = score_over_folds(folds, g, opt, seed);

  // The literal recipe keeps the estimator built from the training part.
  const Dataset& refit_data = opt.refit_on_all ? d : folds[0].train;
  return select_from_scores(refit_data, g, std::move(scores), opt, seed);
}

}  // namespace pkreg::selection
