#pragma once

#include <variant>

#include <Eigen/Dense>

#include "wgpr/gp.hpp"
#include "wgpr/optimize.hpp"
#include "wgpr/wgp.hpp"

namespace wgpr::regressor {

enum class Family { gp, wgp };

// Point estimate used when a single number per prediction is required; for a
// plain GP the two coincide.
enum class PointEstimate { median, mean };

struct ModelSpec {
    Family family = Family::gp;
    optimize::FitConfig fit;
    wgp::WarpOptions warp;
    PointEstimate point = PointEstimate::median;
};

using AnyModel = std::variant<gp::GpModel, wgp::WgpModel>;

AnyModel fit_model(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const ModelSpec& spec);

Eigen::VectorXd predict_point(const AnyModel& model, const Eigen::MatrixXd& x,
                              PointEstimate point);

}  // namespace wgpr::regressor
