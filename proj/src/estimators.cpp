#include "pkreg/estimators.hpp"

#include <chrono>
#include <cmath>

#include "pkreg/linalg.hpp"

namespace pkreg::estimators {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double clip_bound_from_targets(const std::vector<double>& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m > 0.0 ? m : 1.0;  // degenerate all-zero targets
}

void check_epkr_inputs(const data::Dataset& d, int s, const centers::CenterSet& cs,
                       const FitOptions& opt) {
  if (!cs.verified && !opt.allow_unverified_centers)
    throw ConfigError("fit requires a verified center set");
  if (cs.degree != s)
    throw ConfigError("center set degree " + std::to_string(cs.degree) +
                      " does not match requested degree " + std::to_string(s));
  if (cs.dim != d.dim()) throw DimensionError("center set and data dimensions differ");
  const std::size_t n = cs.points.count();
  if (n > d.size() && !opt.allow_overparameterized)
    throw ConfigError("n = " + std::to_string(n) + " basis functions exceed m = " +
                      std::to_string(d.size()) + " samples (pass the force option for a "
                      "least-norm fit)");
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Epkr: return "epkr";
    case Variant::Pkr: return "pkr";
    case Variant::CbrEpkr: return "cbr-epkr";
    case Variant::Gkr: return "gkr";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "epkr") return Variant::Epkr;
  if (name == "pkr") return Variant::Pkr;
  if (name == "cbr-epkr") return Variant::CbrEpkr;
  if (name == "gkr") return Variant::Gkr;
  throw ConfigError("unknown method '" + name + "'");
}

kernel::Kernel Model::kernel() const {
  if (variant == Variant::Gkr) return kernel::GaussKernel{width};
  return kernel::PolyKernel{degree};
}

Model fit_epkr(const data::Dataset& d, int s, const centers::CenterSet& cs,
               const FitOptions& opt) {
  return fit_cbr_epkr(d, s, cs, 0.0, opt);
}

Model fit_cbr_epkr(const data::Dataset& d, int s, const centers::CenterSet& cs, double lambda,
                   const FitOptions& opt) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  check_epkr_inputs(d, s, cs, opt);
  const auto t0 = Clock::now();

  Matrix a = kernel::kernel_matrix(kernel::PolyKernel{s}, d.inputs, cs.points);
  if (lambda > 0.0) {
    const std::size_t k = std::min(a.rows(), a.cols());
    for (std::size_t i = 0; i < k; ++i) a(i, i) += lambda;
  }
  Model m;
  m.variant = lambda > 0.0 ? Variant::CbrEpkr : Variant::Epkr;
  m.degree = s;
  m.lambda = lambda;
  m.basis = cs.points;
  m.coefficients = linalg::pinv_apply(a, d.targets);
  m.clip_bound = clip_bound_from_targets(d.targets);
  m.fit_seconds = seconds_since(t0);
  return m;
}

Model fit_pkr(const data::Dataset& d, int s, double lambda, const FitOptions&) {
  if (s < 1) throw ConfigError("polynomial degree must be >= 1");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (d.size() < 1) throw DataError("fit_pkr: empty dataset");
  const auto t0 = Clock::now();

  const Matrix k = kernel::kernel_matrix(kernel::PolyKernel{s}, d.inputs, d.inputs);
  Model m;
  m.variant = Variant::Pkr;
  m.degree = s;
  m.lambda = lambda;
  m.basis = d.inputs;
  if (lambda > 0.0)
    m.coefficients = linalg::ridge_solve_psd(k, static_cast<double>(d.size()) * lambda,
                                             d.targets);
  else
    m.coefficients = linalg::pinv_apply(k, d.targets);
  m.clip_bound = clip_bound_from_targets(d.targets);
  m.fit_seconds = seconds_since(t0);
  return m;
}

Model fit_gkr(const data::Dataset& d, double delta, double lambda) {
  if (!(delta > 0.0)) throw ConfigError("gaussian width must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (d.size() < 1) throw DataError("fit_gkr: empty dataset");
  const auto t0 = Clock::now();

  const Matrix k = kernel::kernel_matrix(kernel::GaussKernel{delta}, d.inputs, d.inputs);
  Model m;
  m.variant = Variant::Gkr;
  m.width = delta;
  m.lambda = lambda;
  m.basis = d.inputs;
  if (lambda > 0.0)
    m.coefficients = linalg::ridge_solve_psd(k, static_cast<double>(d.size()) * lambda,
                                             d.targets);
  else
    m.coefficients = linalg::pinv_apply(k, d.targets);
  m.clip_bound = clip_bound_from_targets(d.targets);
  m.fit_seconds = seconds_since(t0);
  return m;
}

double predict(const Model& m, std::span<const double> x, bool clipped) {
  if (x.size() != m.dim()) throw DimensionError("predict: input dimension mismatch");
  const kernel::Kernel k = m.kernel();
  double s = 0.0;
  for (std::size_t j = 0; j < m.basis.count(); ++j)
    s += m.coefficients[j] * kernel::eval(k, m.basis[j], x);
  return clipped ? kernel::clip(s, m.clip_bound) : s;
}

std::vector<double> predict_many(const Model& m, const Points& xs, bool clipped) {
  if (xs.dim != m.dim()) throw DimensionError("predict: input dimension mismatch");
  std::vector<double> out(xs.count());
  for (std::size_t i = 0; i < xs.count(); ++i) out[i] = predict(m, xs[i], clipped);
  return out;
}

int classify_plugin(const Model& m, std::span<const double> x) {
  return predict(m, x, /*clipped=*/false) >= 0.5 ? 1 : 0;
}

}  // namespace pkreg::estimators
