#pragma once

#include <vector>

#include "pkreg/centers.hpp"
#include "pkreg/data.hpp"
#include "pkreg/kernel.hpp"

namespace pkreg::estimators {

enum class Variant { Epkr, Pkr, CbrEpkr, Gkr };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

/// Fitted kernel model. Prediction is f(x) = sum_j coefficients[j] *
/// kernel(basis[j], x), optionally clipped to [-clip_bound, clip_bound].
struct Model {
  Variant variant = Variant::Epkr;
  int degree = 0;       // polynomial variants
  double width = 0.0;   // gaussian variant
  double lambda = 0.0;
  Points basis;
  std::vector<double> coefficients;
  double clip_bound = 1.0;
  double fit_seconds = 0.0;  // wall time of the fit itself, not serialized

  std::size_t dim() const { return basis.dim; }
  std::size_t sparsity() const { return basis.count(); }
  kernel::Kernel kernel() const;
};

struct FitOptions {
  /// Allow n > m least-norm fits (statistical guarantees void); off by default.
  bool allow_overparameterized = false;
  /// Accept center sets whose rank check failed at the pinv cutoff; the
  /// pseudo-inverse truncation then acts as the regularizer, matching the
  /// plain algorithm at degrees beyond double-precision verification.
  bool allow_unverified_centers = false;
};

/// Unregularized least squares over the fundamental-system basis, solved by
/// pseudo-inverse: c = pinv(A_{m,n}) y with A_{m,n} = (K_s(x_i, eta_j)).
Model fit_epkr(const data::Dataset& d, int s, const centers::CenterSet& cs,
               const FitOptions& opt = {});

/// Classical polynomial kernel ridge regression: basis = training inputs,
/// (K + m lambda I) c = y; lambda = 0 routes through the pseudo-inverse.
Model fit_pkr(const data::Dataset& d, int s, double lambda, const FitOptions& opt = {});

/// Coefficient-based regularization: c = pinv(A_{m,n} + lambda I_{m,n}) y with
/// the rectangular I_{m,n}; lambda = 0 coincides with fit_epkr exactly.
Model fit_cbr_epkr(const data::Dataset& d, int s, const centers::CenterSet& cs, double lambda,
                   const FitOptions& opt = {});

/// Gaussian kernel ridge regression baseline.
Model fit_gkr(const data::Dataset& d, double delta, double lambda);

double predict(const Model& m, std::span<const double> x, bool clipped = true);
std::vector<double> predict_many(const Model& m, const Points& xs, bool clipped = true);

/// Plug-in classifier: 1 when the unclipped prediction is >= 1/2, else 0.
int classify_plugin(const Model& m, std::span<const double> x);

}  // namespace pkreg::estimators
