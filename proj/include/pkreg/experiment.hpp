#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pkreg/selection.hpp"

namespace pkreg::experiment {

/// One aggregated row of the benchmark table. Numeric fields are arithmetic
/// means over the replicate seeds.
struct ExperimentReport {
  std::string method;
  double param_s = 0.0;
  double param_lambda = 0.0;
  double param_delta = 0.0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  double train_seconds = 0.0;  // selection + final fit wall time
  double test_seconds = 0.0;   // prediction wall time on the test set
  double sparsity = 0.0;       // basis count of the final model
  int replicates = 0;
  std::uint64_t seed = 0;
};

struct ToyTableOptions {
  std::size_t m_train = 1000;
  std::size_t m_test = 1000;
  /// Noise variance of the training targets. The reference protocol's noise
  /// has standard deviation 0.1, hence the 0.01 default.
  double sigma_sq = 0.01;
  int replicates = 10;
  int folds = 3;
  std::uint64_t seed = 1;
  bool arithmetic_lambda_grid = false;
  centers::UniformDomain center_domain = centers::UniformDomain::Ball;
};

/// Full toy benchmark: GKR, PKR, EPKR and EPKR1 (first-sample centers), each
/// selected by k-fold CV over the default grids, averaged over replicates.
/// Row order: gkr, pkr, epkr, epkr1.
std::vector<ExperimentReport> toy_table(const ToyTableOptions& opt);

struct SweepRow {
  std::string method;
  std::string sweep;  // "lambda" | "s" | "m"
  double value = 0.0;
  double mean_test_rmse = 0.0;
  int replicates = 0;
  std::uint64_t seed = 0;
};

struct SweepOptions {
  std::size_t m_train = 1000;
  std::size_t m_test = 1000;
  double sigma_sq = 0.01;
  int replicates = 10;
  std::uint64_t seed = 1;
};

/// TestRMSE as a function of lambda at fixed degree (pkr | cbr-epkr) or fixed
/// width (gkr).
std::vector<SweepRow> sweep_lambda(estimators::Variant method, double s_or_delta,
                                   const std::vector<double>& lambdas, const SweepOptions& opt);

/// TestRMSE as a function of the polynomial degree. EPKR is fit directly; PKR
/// picks lambda per degree by CV unless fixed_lambda is given.
std::vector<SweepRow> sweep_s(estimators::Variant method, const std::vector<int>& s_values,
                              const SweepOptions& opt, std::optional<double> fixed_lambda = {});

/// TestRMSE as a function of the sample size, EPKR with the theoretical
/// degree rule for smoothness r.
std::vector<SweepRow> sweep_m(const std::vector<std::size_t>& m_values, int r,
                              const SweepOptions& opt);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Pinned report schema, stable order, header always present.
extern const char* kReportCsvHeader;
std::string report_csv(const std::vector<ExperimentReport>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace pkreg::experiment
