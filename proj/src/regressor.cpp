#include "wgpr/regressor.hpp"

namespace wgpr::regressor {

AnyModel fit_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const ModelSpec& spec) {
    if (spec.family == Family::gp) return gp::fit(x, y, spec.fit);
    return wgp::fit(x, y, spec.fit, spec.warp);
}

Eigen::VectorXd predict_point(const AnyModel& model, const Eigen::MatrixXd& x,
                              PointEstimate point) {
    Eigen::VectorXd out(x.rows());
    if (const auto* m = std::get_if<gp::GpModel>(&model)) {
        const auto preds = m->predict(x);
        for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = preds[static_cast<std::size_t>(i)].mean;
        return out;
    }
    const auto& m = std::get<wgp::WgpModel>(model);
    const auto preds = m.predict(x);
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const auto& p = preds[static_cast<std::size_t>(i)];
        out[i] = point == PointEstimate::median ? p.median() : p.mean();
    }
    return out;
}

}  // namespace wgpr::regressor
