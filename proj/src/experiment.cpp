#include "pkreg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pkreg/rng.hpp"

namespace pkreg::experiment {

namespace {

using Clock = std::chrono::steady_clock;
using data::Dataset;
using estimators::Model;
using estimators::Variant;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Dataset replicate_train(const ToyTableOptions& opt, int rep) {
  return data::gen_toy(opt.m_train, opt.sigma_sq,
                       mix_seed(opt.seed, {0x747261696eULL, static_cast<std::uint64_t>(rep)}));
}

Dataset replicate_test(std::size_t m_test, std::uint64_t seed, int rep) {
  return data::gen_toy_test(m_test, mix_seed(seed, {0x74657374ULL, static_cast<std::uint64_t>(rep)}));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::vector<ExperimentReport> toy_table(const ToyTableOptions& opt) {
  if (opt.replicates < 1) throw ConfigError("toy_table: replicates must be >= 1");

  const selection::SGrid s_grid = selection::default_s_grid(opt.m_train, 1);
  const std::vector<double> lam_grid = selection::default_lambda_grid(opt.arithmetic_lambda_grid);
  const std::vector<double> delta_grid = selection::default_delta_grid();

  struct MethodSpec {
    std::string name;
    Variant variant;
    centers::Strategy strategy;
  };
  const std::vector<MethodSpec> methods = {
      {"gkr", Variant::Gkr, centers::Strategy::UniformBall},
      {"pkr", Variant::Pkr, centers::Strategy::UniformBall},
      {"epkr", Variant::Epkr, centers::Strategy::UniformBall},
      {"epkr1", Variant::Epkr, centers::Strategy::FirstSamples},
  };

  std::vector<ExperimentReport> rows(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    rows[mi].method = methods[mi].name;
    rows[mi].replicates = opt.replicates;
    rows[mi].seed = opt.seed;
  }

  for (int rep = 0; rep < opt.replicates; ++rep) {
    const Dataset train = replicate_train(opt, rep);
    const Dataset test = replicate_test(opt.m_test, opt.seed, rep);
    const std::uint64_t cv_seed = mix_seed(opt.seed, {0x6376ULL, static_cast<std::uint64_t>(rep)});

    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const MethodSpec& ms = methods[mi];
      selection::SelectionGrid grid;
      grid.s_values = s_grid.values;
      if (ms.variant != Variant::Epkr) grid.lambda_values = lam_grid;
      if (ms.variant == Variant::Gkr) grid.delta_values = delta_grid;

      selection::SelectOptions sopt;
      sopt.center_strategy = ms.strategy;
      sopt.center_domain = opt.center_domain;

      const auto t_train0 = Clock::now();
      const selection::SelectionResult sel =
          selection::kfold_cv(train, grid, ms.variant, opt.folds, cv_seed, sopt);
      const double train_seconds = seconds_since(t_train0);

      const auto t_test0 = Clock::now();
      const std::vector<double> test_pred = estimators::predict_many(sel.model, test.inputs);
      const double test_seconds = seconds_since(t_test0);

      const std::vector<double> train_pred = estimators::predict_many(sel.model, train.inputs);

      ExperimentReport& row = rows[mi];
      row.param_s += sel.chosen_s;
      row.param_lambda += sel.chosen_lambda;
      row.param_delta += sel.chosen_delta;
      row.train_rmse += data::rmse(train_pred, train.targets);
      row.test_rmse += data::rmse(test_pred, test.targets);
      row.train_seconds += train_seconds;
      row.test_seconds += test_seconds;
      row.sparsity += static_cast<double>(sel.model.sparsity());
    }
  }

  const double inv = 1.0 / static_cast<double>(opt.replicates);
  for (auto& row : rows) {
    row.param_s *= inv;
    row.param_lambda *= inv;
    row.param_delta *= inv;
    row.train_rmse *= inv;
    row.test_rmse *= inv;
    row.train_seconds *= inv;
    row.test_seconds *= inv;
    row.sparsity *= inv;
  }
  return rows;
}

std::vector<SweepRow> sweep_lambda(Variant method, double s_or_delta,
                                   const std::vector<double>& lambdas,
                                   const SweepOptions& opt) {
  if (lambdas.empty()) throw ConfigError("sweep_lambda: empty grid");
  if (method == Variant::Epkr) throw ConfigError("sweep_lambda: epkr has no lambda");

  std::vector<SweepRow> rows(lambdas.size());
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    rows[li] = {estimators::variant_name(method), "lambda", lambdas[li], 0.0, opt.replicates,
                opt.seed};
  }

  for (int rep = 0; rep < opt.replicates; ++rep) {
    const Dataset train = data::gen_toy(
        opt.m_train, opt.sigma_sq, mix_seed(opt.seed, {0x747261696eULL, static_cast<std::uint64_t>(rep)}));
    const Dataset test = replicate_test(opt.m_test, opt.seed, rep);

    std::optional<centers::CenterSet> cs;
    estimators::FitOptions fit_opt;
    fit_opt.allow_unverified_centers = true;
    if (method == Variant::CbrEpkr) {
      const int s = static_cast<int>(s_or_delta);
      cs = centers::draw_candidate_centers(
          s, 1, centers::Strategy::UniformBall, std::nullopt,
          mix_seed(opt.seed, {0x63656e74ULL, static_cast<std::uint64_t>(rep)}));
    }
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      Model m;
      switch (method) {
        case Variant::CbrEpkr:
          m = estimators::fit_cbr_epkr(train, static_cast<int>(s_or_delta), *cs, lambdas[li],
                                       fit_opt);
          break;
        case Variant::Pkr:
          m = estimators::fit_pkr(train, static_cast<int>(s_or_delta), lambdas[li]);
          break;
        case Variant::Gkr:
          m = estimators::fit_gkr(train, s_or_delta, lambdas[li]);
          break;
        default:
          throw ConfigError("sweep_lambda: unsupported method");
      }
      rows[li].mean_test_rmse +=
          data::rmse(estimators::predict_many(m, test.inputs), test.targets);
    }
  }
  for (auto& r : rows) r.mean_test_rmse /= static_cast<double>(opt.replicates);
  return rows;
}

std::vector<SweepRow> sweep_s(Variant method, const std::vector<int>& s_values,
                              const SweepOptions& opt, std::optional<double> fixed_lambda) {
  if (s_values.empty()) throw ConfigError("sweep_s: empty grid");
  std::vector<SweepRow> rows(s_values.size());
  for (std::size_t si = 0; si < s_values.size(); ++si)
    rows[si] = {estimators::variant_name(method), "s", static_cast<double>(s_values[si]), 0.0,
                opt.replicates, opt.seed};

  for (int rep = 0; rep < opt.replicates; ++rep) {
    const Dataset train = data::gen_toy(
        opt.m_train, opt.sigma_sq, mix_seed(opt.seed, {0x747261696eULL, static_cast<std::uint64_t>(rep)}));
    const Dataset test = replicate_test(opt.m_test, opt.seed, rep);

    for (std::size_t si = 0; si < s_values.size(); ++si) {
      const int s = s_values[si];
      Model m;
      switch (method) {
        case Variant::Epkr: {
          const auto cs = centers::draw_candidate_centers(
              s, 1, centers::Strategy::UniformBall, std::nullopt,
              mix_seed(opt.seed, {0x73ULL, static_cast<std::uint64_t>(rep),
                                  static_cast<std::uint64_t>(s)}));
          estimators::FitOptions fo;
          fo.allow_unverified_centers = true;
          m = estimators::fit_epkr(train, s, cs, fo);
          break;
        }
        case Variant::Pkr: {
          double lam;
          if (fixed_lambda) {
            lam = *fixed_lambda;
          } else {
            selection::SelectionGrid grid;
            grid.s_values = {s};
            grid.lambda_values = selection::default_lambda_grid();
            const auto sel = selection::kfold_cv(
                train, grid, Variant::Pkr, 3,
                mix_seed(opt.seed, {0x6c63ULL, static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(s)}));
            lam = sel.chosen_lambda;
          }
          m = estimators::fit_pkr(train, s, lam);
          break;
        }
        default:
          throw ConfigError("sweep_s: unsupported method");
      }
      rows[si].mean_test_rmse +=
          data::rmse(estimators::predict_many(m, test.inputs), test.targets);
    }
  }
  for (auto& r : rows) r.mean_test_rmse /= static_cast<double>(opt.replicates);
  return rows;
}

std::vector<SweepRow> sweep_m(const std::vector<std::size_t>& m_values, int r,
                              const SweepOptions& opt) {
  if (m_values.empty()) throw ConfigError("sweep_m: empty grid");
  std::vector<SweepRow> rows(m_values.size());
  for (std::size_t i = 0; i < m_values.size(); ++i)
    rows[i] = {"epkr", "m", static_cast<double>(m_values[i]), 0.0, opt.replicates, opt.seed};

  for (std::size_t i = 0; i < m_values.size(); ++i) {
    const std::size_t m = m_values[i];
    const int s = selection::theoretical_degree(m, 1, r);
    for (int rep = 0; rep < opt.replicates; ++rep) {
      const Dataset train = data::gen_toy(
          m, opt.sigma_sq,
          mix_seed(opt.seed, {0x6dULL, m, static_cast<std::uint64_t>(rep)}));
      const Dataset test = replicate_test(opt.m_test, opt.seed, rep);
      const auto cs = centers::build_fundamental_system(
          s, 1, centers::Strategy::UniformBall, std::nullopt,
          mix_seed(opt.seed, {0x6d63ULL, m, static_cast<std::uint64_t>(rep)}));
      const Model model = estimators::fit_epkr(train, s, cs);
      rows[i].mean_test_rmse +=
          data::rmse(estimators::predict_many(model, test.inputs), test.targets);
    }
    rows[i].mean_test_rmse /= static_cast<double>(opt.replicates);
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("loglog_slope: bad input");
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("spearman: bad input");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

const char* kReportCsvHeader =
    "method,param_s,param_lambda,param_delta,train_rmse,test_rmse,train_seconds,"
    "test_seconds,sparsity,replicates,seed";

std::string report_csv(const std::vector<ExperimentReport>& rows) {
  std::ostringstream os;
  os << kReportCsvHeader << "\n";
  for (const auto& r : rows) {
    os << r.method << "," << fmt(r.param_s) << "," << fmt(r.param_lambda) << ","
       << fmt(r.param_delta) << "," << fmt(r.train_rmse) << "," << fmt(r.test_rmse) << ","
       << fmt(r.train_seconds) << "," << fmt(r.test_seconds) << "," << fmt(r.sparsity) << ","
       << r.replicates << "," << r.seed << "\n";
  }
  return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "method,sweep,value,mean_test_rmse,replicates,seed\n";
  for (const auto& r : rows)
    os << r.method << "," << r.sweep << "," << fmt(r.value) << "," << fmt(r.mean_test_rmse)
       << "," << r.replicates << "," << r.seed << "\n";
  return os.str();
}

}  // namespace pkreg::experiment
