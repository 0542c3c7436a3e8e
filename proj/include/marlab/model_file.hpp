#pragma once

// JSON model files. See README "Model file format" for the schema.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "marlab/model.hpp"

namespace marlab {

struct Model {
  std::string name;
  SampleSpace space;
  MeasureFamily family;
  std::optional<RealFn> q_m;  // per pattern index
  nlohmann::json provenance;  // null when absent
};

/// Throws ValidationError (or UsageError for malformed values) with the JSON
/// path of the offending field in the message.
Model model_from_json(const nlohmann::json& doc);
Model load_model(const std::filesystem::path& path);

/// Writes the joint form in canonical outcome order.
nlohmann::json model_to_json(const Model& model);
void save_model(const Model& model, const std::filesystem::path& path);

/// Built-in fixtures: "E1" (MCAR), "E2" (MNAR, n=1), "E3" (monotone MAR
/// family over θ ∈ {1/4, 1/2}), "E4" (non-monotone MNAR) and
/// "E3-theta-mechanism" (E3 with a θ-dependent dropout mechanism).
Model builtin_fixture(std::string_view name);

}  // namespace marlab
