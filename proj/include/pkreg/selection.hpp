#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pkreg/estimators.hpp"

namespace pkreg::selection {

/// Candidate parameter grid. Only the lists relevant to the method in use
/// need to be populated (s for polynomial variants, delta for gaussian,
/// lambda for the regularized variants).
struct SelectionGrid {
  std::vector<int> s_values;
  std::vector<double> lambda_values;
  std::vector<double> delta_values;
};

struct CandidateScore {
  int s = 0;
  double lambda = 0.0;
  double delta = 0.0;
  double score = std::numeric_limits<double>::infinity();  // mean validation RMSE
  double score_se = 0.0;  // standard error of the mean across folds
  std::string error;      // nonempty when the candidate failed to fit
};

struct SelectionResult {
  int chosen_s = 0;
  double chosen_lambda = 0.0;
  double chosen_delta = 0.0;
  std::vector<CandidateScore> scores;
  estimators::Model model;
  std::uint64_t seed = 0;
};

/// Degree rule: ceil(m^{1/(d+2r)}), computed exactly on integers.
int theoretical_degree(std::size_t m, std::size_t d, int r);

/// Largest rate-optimal regularization parameter:
/// m^{-2r/(2r+d)} * (4d)^{-1/(d+2r)}.
double lambda_upper_bound(std::size_t m, std::size_t d, int r);

struct SGrid {
  std::vector<int> values;
  std::vector<int> removed;  // entries dropped because poly_dim(s, d) > m
};

/// {1, ..., min(ceil(m^{1/d}), cap)} with overparameterized degrees removed.
SGrid default_s_grid(std::size_t m, std::size_t d, std::optional<int> cap = std::nullopt);

/// 50 log-spaced values in [1e-5, 1]; `arithmetic` switches to the plain
/// arithmetic grid {1e-5 + k * 1e-2}.
std::vector<double> default_lambda_grid(bool arithmetic = false);

/// 40 values {0.01 + 0.025 k}.
std::vector<double> default_delta_grid();

struct SelectOptions {
  centers::Strategy center_strategy = centers::Strategy::UniformBall;
  centers::UniformDomain center_domain = centers::UniformDomain::Ball;
  estimators::FitOptions fit;
  bool refit_on_all = false;  // hold-out only; default follows the literal recipe
};

/// k-fold cross-validation over the grid; deterministic per seed. EPKR and
/// CBR-EPKR redraw centers per fold with a fold-local seed derived from the
/// master seed. The winner is the candidate with the smallest parameters
/// (s, then lambda/delta, in enumeration order) whose mean validation RMSE is
/// within one standard error of the minimal mean: scores separated by less
/// than the cross-validation noise count as ties, which resolve toward
/// smaller parameters. It is refit on all data.
SelectionResult kfold_cv(const data::Dataset& d, const SelectionGrid& grid,
                         estimators::Variant method, int k, std::uint64_t seed,
                         const SelectOptions& opt = {});

/// Hold-out selection: split, fit the candidate sequence on the training part,
/// score on the validation part, refit the winner on the training part only
/// (or on everything when refit_on_all is set).
SelectionResult holdout_select(const data::Dataset& d, const SelectionGrid& grid,
                               estimators::Variant method, double split_fraction,
                               std::uint64_t seed, const SelectOptions& opt = {});

}  // namespace pkreg::selection
