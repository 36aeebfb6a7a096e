#include "pkreg/diagnostics.hpp"

#include <cmath>

#include <json.hpp>

#include "pkreg/centers.hpp"
#include "pkreg/kernel.hpp"
#include "pkreg/linalg.hpp"
#include "pkreg/rng.hpp"

namespace pkreg::diagnostics {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double gamma_half_integer(int two_a) {
  if (two_a < 1) throw ConfigError("gamma_half_integer: argument must be >= 1/2");
  if (two_a % 2 == 0) {
    // Gamma(k) = (k-1)!
    double g = 1.0;
    for (int i = 2; i < two_a / 2; ++i) g *= static_cast<double>(i);
    return g;
  }
  // Gamma(1/2 + k) via the recurrence from Gamma(1/2) = sqrt(pi).
  double g = std::sqrt(kPi);
  for (int t = 1; t < two_a; t += 2) g *= static_cast<double>(t) / 2.0;
  return g;
}

double eig_bound_value(int s, std::size_t d) {
  double s_fact = 1.0;
  for (int i = 2; i <= s; ++i) s_fact *= static_cast<double>(i);
  const double num = s_fact * gamma_half_integer(static_cast<int>(d));
  const double den = kernel::pow_int(2.0, s) * gamma_half_integer(2 * s + static_cast<int>(d));
  return num / den;
}

EigBoundReport check_eig_bound(int s, std::size_t d, std::uint64_t seed) {
  if (s < 1) throw ConfigError("check_eig_bound: s must be >= 1");
  if (d < 2) throw ConfigError("check_eig_bound: d must be >= 2");
  const std::size_t n = centers::poly_dim(s, d);
  if (n > 2000) throw ConfigError("check_eig_bound: n too large for a dense eigensolve");

  const Points xi = centers::sample_sphere(d, n, seed);
  const Matrix a = kernel::kernel_matrix(kernel::PolyKernel{s}, xi, xi);

  EigBoundReport r;
  r.s = s;
  r.d = d;
  r.n = n;
  r.bound = eig_bound_value(s, d);
  r.observed_min_eig = linalg::min_eig_sym(a);
  r.pass = r.observed_min_eig >= r.bound - 1e-9;
  return r;
}

Quadrature chebyshev_quadrature(int node_count) {
  if (node_count < 1) throw ConfigError("chebyshev_quadrature: need at least one node");
  Quadrature q;
  q.nodes.resize(node_count);
  q.weights.assign(node_count, kPi / static_cast<double>(node_count));
  for (int k = 1; k <= node_count; ++k)
    q.nodes[k - 1] = std::cos((2.0 * k - 1.0) * kPi / (2.0 * node_count));
  return q;
}

NormEquivReport check_norm_equivalence(int s, std::size_t m, std::uint64_t seed, double slack) {
  if (s < 1) throw ConfigError("check_norm_equivalence: s must be >= 1");
  const std::size_t n = static_cast<std::size_t>(s) + 1;
  if (m < n) throw ConfigError("check_norm_equivalence: m must be >= n = s + 1");

  const centers::CenterSet cs = centers::build_fundamental_system(
      s, 1, centers::Strategy::UniformBall, std::nullopt, mix_seed(seed, {0x6e65ULL}));

  Rng rng(mix_seed(seed, {0x6e71ULL}));
  std::vector<double> c(n);
  for (double& v : c) v = rng.normal();

  // Arcsine samples on [-1, 1]: cos(pi U) has density 1/(pi sqrt(1 - x^2)).
  Points xs(1, m);
  for (std::size_t i = 0; i < m; ++i) xs.coords[i] = std::cos(kPi * rng.uniform());

  const Matrix a = kernel::kernel_matrix(kernel::PolyKernel{s}, xs, cs.points);
  const std::vector<double> ac = a * c;
  double q = 0.0;
  for (double v : ac) q += v * v;
  q /= static_cast<double>(m);

  // Exact weighted norm: f^2 has degree 2s, N = s + 1 nodes integrate degree
  // <= 2N - 1 = 2s + 1 exactly. Divide by pi for the probability measure.
  const Quadrature quad = chebyshev_quadrature(s + 1);
  double integral = 0.0;
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const double node = quad.nodes[k];
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      f += c[j] * kernel::pow_int(1.0 + cs.points.coords[j] * node, s);
    integral += quad.weights[k] * f * f;
  }
  integral /= kPi;

  NormEquivReport r;
  r.s = s;
  r.m = m;
  r.n = n;
  r.integral_norm = integral;
  r.quadratic_form = q;
  r.slack = slack;
  r.ratio = integral > 0.0 ? q / integral : 1.0;  // c = 0 convention
  r.pass = r.ratio >= 1.0 - slack && r.ratio <= 3.0 + slack;
  r.design_rank = linalg::rank(a);
  return r;
}

EigBatterySummary run_eig_battery(const std::vector<std::pair<std::size_t, int>>& d_s_pairs,
                                  int trials, std::uint64_t seed) {
  EigBatterySummary summary;
  for (auto [d, s] : d_s_pairs) {
    for (int t = 0; t < trials; ++t) {
      const auto r = check_eig_bound(s, d, mix_seed(seed, {d, static_cast<std::uint64_t>(s),
                                                           static_cast<std::uint64_t>(t)}));
      if (!r.pass) ++summary.violations;
      summary.reports.push_back(r);
    }
  }
  return summary;
}

NormBatterySummary run_norm_battery(const std::vector<int>& s_values, int trials,
                                    std::uint64_t seed) {
  NormBatterySummary summary;
  for (int s : s_values) {
    const std::size_t m = 100 * (static_cast<std::size_t>(s) + 1);
    for (int t = 0; t < trials; ++t) {
      const auto r = check_norm_equivalence(
          s, m, mix_seed(seed, {static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(t)}));
      if (r.pass) ++summary.passes;
      summary.reports.push_back(r);
    }
  }
  return summary;
}

std::string battery_json(const EigBatterySummary& eig, const NormBatterySummary& norm) {
  nlohmann::json j;
  j["eig_bound"]["trials"] = eig.reports.size();
  j["eig_bound"]["violations"] = eig.violations;
  j["eig_bound"]["reports"] = nlohmann::json::array();
  for (const auto& r : eig.reports)
    j["eig_bound"]["reports"].push_back({{"s", r.s},
                                         {"d", r.d},
                                         {"n", r.n},
                                         {"observed_min_eig", r.observed_min_eig},
                                         {"bound", r.bound},
                                         {"pass", r.pass}});
  j["norm_equivalence"]["trials"] = norm.reports.size();
  j["norm_equivalence"]["passes"] = norm.passes;
  j["norm_equivalence"]["reports"] = nlohmann::json::array();
  for (const auto& r : norm.reports)
    j["norm_equivalence"]["reports"].push_back({{"s", r.s},
                                                {"m", r.m},
                                                {"n", r.n},
                                                {"integral_norm", r.integral_norm},
                                                {"quadratic_form", r.quadratic_form},
                                                {"ratio", r.ratio},
                                                {"design_rank", r.design_rank},
                                                {"pass", r.pass}});
  return j.dump(2);
}

}  // namespace pkreg::diagnostics
