#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pkreg/diagnostics.hpp"
#include "pkreg/experiment.hpp"
#include "pkreg/model_io.hpp"
#include "pkreg/rng.hpp"

namespace {

using namespace pkreg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct DataArgs {
  std::string path;
  bool has_header = false;
  std::vector<double> toy;  // {m, sigma_sq}
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
  auto* file = cmd->add_option("--data", args.path, "CSV file, last column is the target");
  cmd->add_flag("--header", args.has_header, "skip the first CSV line");
  auto* toy = cmd->add_option("--toy", args.toy, "toy data: m sigma_sq")->expected(2);
  file->excludes(toy);
}

struct LoadedData {
  data::Dataset dataset;                              // normalized when from file
  std::optional<data::NormalizationRecord> normalization;
};

LoadedData load_training_data(const DataArgs& args, std::uint64_t seed) {
  if (!args.toy.empty()) {
    LoadedData out;
    out.dataset = data::gen_toy(static_cast<std::size_t>(args.toy[0]), args.toy[1],
                                mix_seed(seed, {0x64617461ULL}));
    return out;
  }
  if (args.path.empty()) throw ConfigError("either --data or --toy is required");
  LoadedData out;
  auto raw = data::load_csv(args.path, args.has_header);
  auto [normalized, rec] = data::normalize_ball(raw);
  out.dataset = std::move(normalized);
  out.normalization = std::move(rec);
  return out;
}

centers::Strategy strategy_from_name(const std::string& name) {
  if (name == "uniform") return centers::Strategy::UniformBall;
  if (name == "first") return centers::Strategy::FirstSamples;
  if (name == "equispaced") return centers::Strategy::Equispaced1d;
  if (name == "gaussian") return centers::Strategy::Gaussian;
  throw ConfigError("unknown center strategy '" + name + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

int run(CLI::App& app, int argc, char** argv) {
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "master seed")->capture_default_str();

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "fit a model and write a JSON model file");
  DataArgs fit_data;
  add_data_options(fit, fit_data);
  std::string method = "epkr";
  fit->add_option("--method", method, "epkr | pkr | cbr-epkr | gkr")->capture_default_str();
  int s = 0;
  double lambda = 0.0, delta = 0.0;
  fit->add_option("--s", s, "polynomial degree");
  fit->add_option("--lambda", lambda, "regularization parameter");
  fit->add_option("--delta", delta, "gaussian kernel width");
  std::string select;
  fit->add_option("--select", select, "choose parameters by 'cv' or 'holdout'");
  int folds = 3;
  fit->add_option("--folds", folds, "folds for --select cv")->capture_default_str();
  double holdout_fraction = 2.0 / 3.0;
  fit->add_option("--holdout-fraction", holdout_fraction, "training fraction for --select holdout");
  std::string centers_name = "uniform";
  fit->add_option("--centers", centers_name, "uniform | first | equispaced | gaussian")
      ->capture_default_str();
  std::string center_domain = "ball";
  fit->add_option("--center-domain", center_domain, "ball | cube01")->capture_default_str();
  bool force = false;
  fit->add_flag("--force", force, "allow n > m least-norm fits");
  bool arithmetic_grid = false;
  fit->add_flag("--arithmetic-lambda-grid", arithmetic_grid,
                "use the arithmetic lambda grid instead of the log-spaced one");
  std::string out_path = "model.json";
  fit->add_option("-o,--output", out_path, "model file path")->capture_default_str();

  // ---- predict ----
  auto* predict = app.add_subcommand("predict", "predict with a model file");
  std::string model_path;
  predict->add_option("--model", model_path, "model JSON file")->required();
  DataArgs predict_data;
  add_data_options(predict, predict_data);
  bool no_clip = false;
  predict->add_flag("--no-clip", no_clip, "disable clipping");
  std::string pred_out = "predictions.csv";
  predict->add_option("-o,--output", pred_out, "predictions CSV path")->capture_default_str();

  // ---- toy-table ----
  auto* toy = app.add_subcommand("toy-table", "reproduce the toy benchmark table");
  experiment::ToyTableOptions topt;
  toy->add_option("--m", topt.m_train, "training samples")->capture_default_str();
  toy->add_option("--m-test", topt.m_test, "test samples")->capture_default_str();
  toy->add_option("--sigma2", topt.sigma_sq, "noise variance")->capture_default_str();
  toy->add_option("--replicates", topt.replicates, "replicates")->capture_default_str();
  toy->add_option("--folds", topt.folds, "CV folds")->capture_default_str();
  bool toy_arith = false;
  toy->add_flag("--arithmetic-lambda-grid", toy_arith, "arithmetic lambda grid");
  std::string toy_out = "toy_table.csv";
  toy->add_option("-o,--output", toy_out, "report CSV path")->capture_default_str();

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "TestRMSE sweeps over lambda, s or m");
  std::string sweep_var;
  sweep->add_option("--sweep", sweep_var, "lambda | s | m")->required();
  std::string sweep_method = "epkr";
  sweep->add_option("--method", sweep_method, "epkr | pkr | cbr-epkr | gkr")
      ->capture_default_str();
  int sweep_s_fixed = 0;
  sweep->add_option("--s", sweep_s_fixed, "fixed degree for lambda sweeps");
  double sweep_delta = 0.0;
  sweep->add_option("--delta", sweep_delta, "fixed width for gkr lambda sweeps");
  double sweep_lambda_fixed = -1.0;
  sweep->add_option("--lambda", sweep_lambda_fixed, "fixed lambda for s sweeps");
  int sweep_smax = 50;
  sweep->add_option("--s-max", sweep_smax, "largest degree for s sweeps")->capture_default_str();
  std::vector<std::size_t> sweep_ms = {250, 500, 1000, 2000, 4000};
  sweep->add_option("--m-grid", sweep_ms, "sample sizes for m sweeps");
  int sweep_r = 4;
  sweep->add_option("--r", sweep_r, "smoothness for the m-sweep degree rule")
      ->capture_default_str();
  experiment::SweepOptions swopt;
  sweep->add_option("--m", swopt.m_train, "training samples")->capture_default_str();
  sweep->add_option("--sigma2", swopt.sigma_sq, "noise variance")->capture_default_str();
  sweep->add_option("--replicates", swopt.replicates, "replicates")->capture_default_str();
  std::string sweep_out = "sweep.csv";
  sweep->add_option("-o,--output", sweep_out, "sweep CSV path")->capture_default_str();

  // ---- diagnostics ----
  auto* diag = app.add_subcommand("diagnostics", "matrix-analytic check batteries");
  int diag_trials = 100;
  diag->add_option("--trials", diag_trials, "trials per configuration")->capture_default_str();
  int eig_d = 0, eig_s = 0;
  diag->add_option("--eig-d", eig_d, "restrict the eigenvalue battery to this dimension");
  diag->add_option("--eig-s", eig_s, "restrict the eigenvalue battery to this degree");
  int norm_s = 0;
  std::size_t norm_m = 0;
  diag->add_option("--norm-s", norm_s, "restrict the norm battery to this degree");
  diag->add_option("--norm-m", norm_m, "sample count for the norm battery (default 100n)");
  std::string diag_out;
  diag->add_option("-o,--output", diag_out, "JSON report path (stdout when omitted)");

  app.require_subcommand(1);
  app.parse(argc, argv);

  if (fit->parsed()) {
    const LoadedData loaded = load_training_data(fit_data, seed);
    const data::Dataset& train = loaded.dataset;
    const auto variant = estimators::variant_from_name(method);
    selection::SelectOptions sopt;
    sopt.center_strategy = strategy_from_name(centers_name);
    sopt.center_domain = center_domain == "cube01" ? centers::UniformDomain::Cube01
                                                   : centers::UniformDomain::Ball;
    sopt.fit.allow_overparameterized = force;

    estimators::Model model;
    if (!select.empty()) {
      selection::SelectionGrid grid;
      grid.s_values = selection::default_s_grid(train.size(), train.dim()).values;
      grid.lambda_values = selection::default_lambda_grid(arithmetic_grid);
      grid.delta_values = selection::default_delta_grid();
      const auto sel = select == "holdout"
                           ? selection::holdout_select(train, grid, variant, holdout_fraction,
                                                       seed, sopt)
                           : selection::kfold_cv(train, grid, variant, folds, seed, sopt);
      model = sel.model;
    } else {
      switch (variant) {
        case estimators::Variant::Epkr:
        case estimators::Variant::CbrEpkr: {
          if (s < 1) throw ConfigError("--s is required for epkr/cbr-epkr");
          const std::size_t n = centers::poly_dim(s, train.dim());
          if (n > train.size() && !force)
            throw ConfigError("n = " + std::to_string(n) + " > m = " +
                              std::to_string(train.size()) +
                              " (use --force for a least-norm fit)");
          std::optional<Points> source;
          if (sopt.center_strategy == centers::Strategy::FirstSamples) source = train.inputs;
          const auto cs = centers::draw_candidate_centers(
              s, train.dim(), sopt.center_strategy, source, mix_seed(seed, {0x63ULL}),
              sopt.center_domain);
          estimators::FitOptions fo = sopt.fit;
          fo.allow_unverified_centers = true;
          model = variant == estimators::Variant::Epkr
                      ? estimators::fit_epkr(train, s, cs, fo)
                      : estimators::fit_cbr_epkr(train, s, cs, lambda, fo);
          break;
        }
        case estimators::Variant::Pkr:
          if (s < 1) throw ConfigError("--s is required for pkr");
          model = estimators::fit_pkr(train, s, lambda, sopt.fit);
          break;
        case estimators::Variant::Gkr:
          if (!(delta > 0.0)) throw ConfigError("--delta is required for gkr");
          model = estimators::fit_gkr(train, delta, lambda);
          break;
      }
    }
    model_io::save_model(model, loaded.normalization, out_path);
    const auto train_pred = estimators::predict_many(model, train.inputs);
    std::cout << "TrainRMSE " << data::rmse(train_pred, train.targets) << "\n";
    return kExitOk;
  }

  if (predict->parsed()) {
    const auto loaded = model_io::load_model(model_path);
    data::Dataset raw;
    if (!predict_data.toy.empty()) {
      raw = data::gen_toy(static_cast<std::size_t>(predict_data.toy[0]), predict_data.toy[1],
                          mix_seed(seed, {0x64617461ULL}));
    } else {
      if (predict_data.path.empty()) throw ConfigError("either --data or --toy is required");
      raw = data::load_csv(predict_data.path, predict_data.has_header);
    }
    const Points inputs = loaded.normalization
                              ? data::apply_normalization(*loaded.normalization, raw.inputs)
                              : raw.inputs;
    const auto preds = estimators::predict_many(loaded.model, inputs, !no_clip);
    std::ostringstream os;
    os << "prediction\n";
    os.precision(17);
    for (double p : preds) os << p << "\n";
    write_file(pred_out, os.str());
    if (!raw.targets.empty())
      std::cout << "TestRMSE " << data::rmse(preds, raw.targets) << "\n";
    return kExitOk;
  }

  if (toy->parsed()) {
    topt.seed = seed;
    topt.arithmetic_lambda_grid = toy_arith;
    const auto rows = experiment::toy_table(topt);
    write_file(toy_out, experiment::report_csv(rows));
    std::cout << experiment::report_csv(rows);
    return kExitOk;
  }

  if (sweep->parsed()) {
    swopt.seed = seed;
    std::vector<experiment::SweepRow> rows;
    if (sweep_var == "lambda") {
      const auto variant = estimators::variant_from_name(sweep_method);
      const double fixed = variant == estimators::Variant::Gkr ? sweep_delta
                                                               : static_cast<double>(sweep_s_fixed);
      if (variant != estimators::Variant::Gkr && sweep_s_fixed < 1)
        throw ConfigError("--s is required for lambda sweeps of polynomial methods");
      if (variant == estimators::Variant::Gkr && !(sweep_delta > 0.0))
        throw ConfigError("--delta is required for gkr lambda sweeps");
      rows = experiment::sweep_lambda(variant, fixed, selection::default_lambda_grid(), swopt);
    } else if (sweep_var == "s") {
      std::vector<int> s_values;
      for (int v = 1; v <= sweep_smax; ++v) s_values.push_back(v);
      std::optional<double> fixed_lambda;
      if (sweep_lambda_fixed >= 0.0) fixed_lambda = sweep_lambda_fixed;
      rows = experiment::sweep_s(estimators::variant_from_name(sweep_method), s_values, swopt,
                                 fixed_lambda);
    } else if (sweep_var == "m") {
      rows = experiment::sweep_m(sweep_ms, sweep_r, swopt);
      std::vector<double> xs, mse;
      for (const auto& r : rows) {
        xs.push_back(r.value);
        mse.push_back(r.mean_test_rmse * r.mean_test_rmse);
      }
      std::cerr << "log-log slope of mean squared test error vs m: "
                << experiment::loglog_slope(xs, mse) << "\n";
    } else {
      throw ConfigError("--sweep must be lambda, s or m");
    }
    write_file(sweep_out, experiment::sweep_csv(rows));
    std::cout << experiment::sweep_csv(rows);
    return kExitOk;
  }

  if (diag->parsed()) {
    std::vector<std::pair<std::size_t, int>> combos = {{2, 1}, {2, 2}, {2, 3},
                                                       {3, 1}, {3, 2}, {3, 3}};
    if (eig_d > 0 || eig_s > 0) {
      combos.clear();
      for (std::size_t d : {2UL, 3UL})
        for (int s : {1, 2, 3}) {
          if (eig_d > 0 && static_cast<std::size_t>(eig_d) != d) continue;
          if (eig_s > 0 && eig_s != s) continue;
          combos.push_back({d, s});
        }
      if (combos.empty()) combos.push_back({static_cast<std::size_t>(eig_d), eig_s});
    }
    const auto eig = diagnostics::run_eig_battery(combos, diag_trials, seed);
    std::vector<int> norm_degrees = {1, 2, 3};
    if (norm_s > 0) norm_degrees = {norm_s};
    diagnostics::NormBatterySummary norm;
    if (norm_m > 0) {
      for (int s : norm_degrees)
        for (int t = 0; t < diag_trials; ++t) {
          const auto r = diagnostics::check_norm_equivalence(
              s, norm_m, mix_seed(seed, {static_cast<std::uint64_t>(s),
                                         static_cast<std::uint64_t>(t)}));
          if (r.pass) ++norm.passes;
          norm.reports.push_back(r);
        }
    } else {
      norm = diagnostics::run_norm_battery(norm_degrees, diag_trials, seed);
    }
    const std::string json = diagnostics::battery_json(eig, norm);
    if (diag_out.empty())
      std::cout << json << "\n";
    else
      write_file(diag_out, json + "\n");
    std::cerr << "eig bound: " << eig.violations << " violations / " << eig.reports.size()
              << " trials\n";
    std::cerr << "norm equivalence: " << norm.passes << " passes / " << norm.reports.size()
              << " trials\n";
    const bool norm_ok =
        norm.passes * 10 >= norm.reports.size() * 9;  // >= 90%
    const bool eig_ok = eig.violations == 0;
    return (norm_ok && eig_ok) ? kExitOk : kExitNumerical;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial and gaussian kernel regression toolkit"};
  try {
    return run(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const pkreg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pkreg::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const pkreg::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const pkreg::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
