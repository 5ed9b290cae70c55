#include "wgpr/serialize.hpp"

#include <fstream>

#include "wgpr/errors.hpp"
#include "wgpr/version.hpp"

namespace wgpr::serialize {

namespace {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        j.push_back(std::move(row));
    }
    return j;
}

Eigen::VectorXd vector_from(const nlohmann::json& j) {
    if (!j.is_array()) throw DataError("model document: expected a numeric array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j) {
    if (!j.is_array()) throw DataError("model document: expected a row-array matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw DataError("model document: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

nlohmann::json gp_body(const gp::GpModel& m) {
    nlohmann::json j;
    j["x_scaler"] = {{"mean", vector_json(m.x_scaler.mean)}, {"sd", vector_json(m.x_scaler.sd)}};
    j["x_train"] = matrix_json(m.x_train);
    j["y_centered"] = vector_json(m.y_centered);
    j["y_mean"] = m.y_mean;
    j["kernel"] = {{"signal_variance", m.params.signal_variance},
                   {"lengthscales", vector_json(m.params.lengthscales)},
                   {"noise_variance", m.params.noise_variance}};
    j["alpha"] = vector_json(m.alpha);
    j["evidence"] = m.evidence;
    return j;
}

gp::GpModel gp_from_body(const nlohmann::json& j) {
    gp::StandardScaler scaler;
    scaler.mean = vector_from(j.at("x_scaler").at("mean"));
    scaler.sd = vector_from(j.at("x_scaler").at("sd"));

    kernel::KernelParams params;
    params.signal_variance = j.at("kernel").at("signal_variance").get<double>();
    params.lengthscales = vector_from(j.at("kernel").at("lengthscales"));
    params.noise_variance = j.at("kernel").at("noise_variance").get<double>();

    const Eigen::VectorXd alpha = vector_from(j.at("alpha"));
    return gp::GpModel::assemble(std::move(scaler), matrix_from(j.at("x_train")),
                                 vector_from(j.at("y_centered")), j.at("y_mean").get<double>(),
                                 std::move(params), &alpha);
}

nlohmann::json context_json(const ModelContext& c) {
    nlohmann::json j;
    j["feature_names"] = c.feature_names;
    j["target_name"] = c.target_name;
    j["transforms"] = c.transforms;
    return j;
}

ModelContext context_from(const nlohmann::json& j) {
    ModelContext c;
    if (j.contains("feature_names"))
        c.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (j.contains("target_name")) c.target_name = j.at("target_name").get<std::string>();
    if (j.contains("transforms"))
        c.transforms = j.at("transforms").get<std::vector<std::string>>();
    return c;
}

}  // namespace

nlohmann::json to_json(const gp::GpModel& model) {
    nlohmann::json j;
    j["format"] = "wgpr-model";
    j["tool_version"] = kVersion;
    j["family"] = "gp";
    j["model"] = gp_body(model);
    return j;
}

nlohmann::json to_json(const wgp::WgpModel& model) {
    nlohmann::json j;
    j["format"] = "wgpr-model";
    j["tool_version"] = kVersion;
    j["family"] = "wgp";
    j["model"] = gp_body(model.latent);
    j["model"]["warp"] = {{"step_sizes", vector_json(model.warp_params.step_sizes)},
                          {"steepnesses", vector_json(model.warp_params.steepnesses)},
                          {"positions", vector_json(model.warp_params.positions)},
                          {"include_identity", model.warp_params.include_identity}};
    j["model"]["y_scaler"] = {{"shift", model.y_scaler.shift}, {"scale", model.y_scaler.scale}};
    j["model"]["joint_evidence"] = model.evidence;
    return j;
}

gp::GpModel gp_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "wgpr-model" || j.value("family", "") != "gp")
        throw DataError("not a gp model document");
    return gp_from_body(j.at("model"));
}

wgp::WgpModel wgp_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "wgpr-model" || j.value("family", "") != "wgp")
        throw DataError("not a wgp model document");
    const nlohmann::json& body = j.at("model");

    wgp::WgpModel m;
    m.latent = gp_from_body(body);
    m.warp_params.step_sizes = vector_from(body.at("warp").at("step_sizes"));
    m.warp_params.steepnesses = vector_from(body.at("warp").at("steepnesses"));
    m.warp_params.positions = vector_from(body.at("warp").at("positions"));
    m.warp_params.include_identity = body.at("warp").at("include_identity").get<bool>();
    m.warp_params.validate();
    m.y_scaler.shift = body.at("y_scaler").at("shift").get<double>();
    m.y_scaler.scale = body.at("y_scaler").at("scale").get<double>();
    m.evidence = body.at("joint_evidence").get<double>();
    return m;
}

void save_model(const std::string& path, const regressor::AnyModel& model,
                const ModelContext& context, const nlohmann::json* provenance) {
    nlohmann::json j = std::visit([](const auto& m) { return to_json(m); }, model);
    j["context"] = context_json(context);
    if (provenance) j["provenance"] = *provenance;

    std::ofstream out(path);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed while writing model file: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file " + path + " is not valid JSON: " + e.what());
    }
    try {
        LoadedModel loaded;
        if (j.contains("context")) loaded.context = context_from(j.at("context"));
        const std::string family = j.value("family", "");
        if (family == "gp")
            loaded.model = gp_from_json(j);
        else if (family == "wgp")
            loaded.model = wgp_from_json(j);
        else
            throw DataError("model file " + path + ": unknown family '" + family + "'");
        return loaded;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("model file " + path + " is malformed: " + e.what());
    }
}

}  // namespace wgpr::serialize
