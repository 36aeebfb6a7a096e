#pragma once

#include <optional>
#include <string>

#include "pkreg/data.hpp"
#include "pkreg/estimators.hpp"

namespace pkreg::model_io {

/// JSON model file: variant, parameters, basis, coefficients, clip bound and
/// the normalization record when the model was fit on normalized data.
/// Timing is deliberately not serialized so identical fits produce identical
/// bytes.
void save_model(const estimators::Model& m,
                const std::optional<data::NormalizationRecord>& normalization,
                const std::string& path);

struct LoadedModel {
  estimators::Model model;
  std::optional<data::NormalizationRecord> normalization;
};

LoadedModel load_model(const std::string& path);

}  // namespace pkreg::model_io
