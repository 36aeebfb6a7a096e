#include "pkreg/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace pkreg::model_io {

using nlohmann::json;

void save_model(const estimators::Model& m,
                const std::optional<data::NormalizationRecord>& normalization,
                const std::string& path) {
  json j;
  j["format"] = "pkreg-model-v1";
  j["variant"] = estimators::variant_name(m.variant);
  j["dimension"] = m.dim();
  j["lambda"] = m.lambda;
  if (m.variant == estimators::Variant::Gkr)
    j["width"] = m.width;
  else
    j["degree"] = m.degree;
  j["clip_bound"] = m.clip_bound;
  j["basis"] = json::array();
  for (std::size_t i = 0; i < m.basis.count(); ++i) {
    auto p = m.basis[i];
    j["basis"].push_back(std::vector<double>(p.begin(), p.end()));
  }
  j["coefficients"] = m.coefficients;
  if (normalization) {
    j["normalization"] = {{"shift", normalization->shift},
                          {"scale", normalization->scale},
                          {"radial_scale", normalization->radial_scale},
                          {"invertible", normalization->invertible}};
  } else {
    j["normalization"] = nullptr;
  }

  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << j.dump(2) << "\n";
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw DataError("corrupt model file '" + path + "': " + ex.what());
  }

  LoadedModel out;
  try {
    estimators::Model& m = out.model;
    m.variant = estimators::variant_from_name(j.at("variant").get<std::string>());
    const std::size_t dim = j.at("dimension").get<std::size_t>();
    m.lambda = j.at("lambda").get<double>();
    if (m.variant == estimators::Variant::Gkr)
      m.width = j.at("width").get<double>();
    else
      m.degree = j.at("degree").get<int>();
    m.clip_bound = j.at("clip_bound").get<double>();
    std::vector<double> flat;
    for (const auto& row : j.at("basis")) {
      const auto p = row.get<std::vector<double>>();
      if (p.size() != dim) throw DataError("corrupt model file: basis point dimension");
      flat.insert(flat.end(), p.begin(), p.end());
    }
    m.basis = Points(dim, std::move(flat));
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (m.coefficients.size() != m.basis.count())
      throw DataError("corrupt model file: coefficient count mismatch");
    if (!j.at("normalization").is_null()) {
      const auto& n = j.at("normalization");
      data::NormalizationRecord rec;
      rec.shift = n.at("shift").get<std::vector<double>>();
      rec.scale = n.at("scale").get<std::vector<double>>();
      rec.radial_scale = n.at("radial_scale").get<double>();
      rec.invertible = n.at("invertible").get<bool>();
      out.normalization = std::move(rec);
    }
  } catch (const json::exception& ex) {
    throw DataError("corrupt model file '" + path + "': " + ex.what());
  }
  return out;
}

}  // namespace pkreg::model_io
