#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgpr/regressor.hpp"

namespace wgpr::serialize {

// Dataset bookkeeping carried alongside the model so `predict` can select the
// right columns and report in original target units.
struct ModelContext {
    std::vector<std::string> feature_names;
    std::string target_name;
    std::vector<std::string> transforms;
};

nlohmann::json to_json(const gp::GpModel& model);
nlohmann::json to_json(const wgp::WgpModel& model);

gp::GpModel gp_from_json(const nlohmann::json& j);
wgp::WgpModel wgp_from_json(const nlohmann::json& j);

struct LoadedModel {
    regressor::AnyModel model;
    ModelContext context;
};

// Document layout: {"format": "wgpr-model", "tool_version": ..., "family":
// "gp"|"wgp", "context": {...}, "model": {...}}. Stored alpha is trusted on
// load; the Cholesky factor is recomputed from the stored training data.
// `provenance`, when given, is embedded verbatim.
void save_model(const std::string& path, const regressor::AnyModel& model,
                const ModelContext& context, const nlohmann::json* provenance = nullptr);
LoadedModel load_model(const std::string& path);

}  // namespace wgpr::serialize
