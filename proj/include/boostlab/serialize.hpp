#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "boostlab/boost.hpp"
#include "boostlab/tree.hpp"

namespace boostlab {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const Stump& stump);
nlohmann::json to_json(const RegressionTree& tree);
nlohmann::json to_json(const ObliviousTree& tree);
nlohmann::json to_json(const BoostParams& params);

Stump stump_from_json(const nlohmann::json& doc);
RegressionTree regression_tree_from_json(const nlohmann::json& doc);
ObliviousTree oblivious_tree_from_json(const nlohmann::json& doc);
BoostParams params_from_json(const nlohmann::json& doc, const BoostParams& defaults);

/// Envelope: {format_version, algorithm, params, schema, base_score,
/// trees | stumps, cat_encoding_state}. Layout is documented in
/// docs/model_format.md.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace boostlab
