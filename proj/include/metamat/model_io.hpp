#pragma once

#include <array>
#include <string>
#include <variant>

#include "metamat/dataset.hpp"
#include "metamat/forest.hpp"
#include "metamat/metrics.hpp"
#include "metamat/mlp.hpp"
#include "metamat/poly.hpp"

namespace metamat::regress {

using AnyModel = std::variant<PolyLinearModel, ForestModel, MlpModel>;

std::string model_kind(const AnyModel& model);  // "poly" | "forest" | "mlp"

double predict(const AnyModel& model, const std::array<double, 3>& features);

/// Versioned JSON for all three model families. MLP models embed the
/// feature scaler they were trained behind, so a loaded model predicts from
/// raw ratios like the others.
struct SavedModel {
  AnyModel model;
  dataset::TargetKind target = dataset::TargetKind::cutoff;
  std::optional<dataset::Scaler> scaler;  // present for mlp
};

std::string model_to_json(const SavedModel& saved);
SavedModel model_from_json(const std::string& text);

double predict(const SavedModel& saved, const std::array<double, 3>& features);

/// {"model":...,"target":...,"split":...,"rmse":...,"r2":...,"n":...}
std::string metrics_json(const std::string& model, const std::string& target,
                         const std::string& split, const Metrics& m);

}  // namespace metamat::regress
