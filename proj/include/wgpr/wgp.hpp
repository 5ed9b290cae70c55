#pragma once

#include <vector>

#include <Eigen/Dense>

#include "wgpr/gp.hpp"
#include "wgpr/kernel.hpp"
#include "wgpr/optimize.hpp"
#include "wgpr/warp.hpp"

namespace wgpr::wgp {

// Affine target pre-scaling s(y) = (y - shift) / scale applied before the
// warp; undone when predictions are mapped back to observation units.
struct AffineScaler {
    double shift = 0.0;
    double scale = 1.0;

    double to_scaled(double y) const { return (y - shift) / scale; }
    double to_output(double y_scaled) const { return shift + scale * y_scaled; }
    Eigen::VectorXd to_scaled(const Eigen::VectorXd& y) const;

    // Maps [min(y), max(y)] onto [-1, 1].
    static AffineScaler unit_range(const Eigen::VectorXd& y);
};

struct WarpOptions {
    int steps = 5;
    bool include_identity = true;
};

struct JointValue {
    double value = 0.0;
    // Layout: [log nu, log sigma_1..D, log sigma_n^2, log a_1..L, log b_1..L, c_1..L].
    Eigen::VectorXd gradient;
};

// Joint likelihood of kernel and warp parameters on targets y (already in the
// scale the warp operates on):
//   log N(g(y) | 0, K + sigma_n^2 I) + sum_i log g'(y_i)
// The second term is the change-of-variables correction for the warp.
JointValue log_likelihood(const kernel::KernelParams& kernel_params,
                          const warp::WarpParams& warp_params, const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& y);

// One test point's latent Gaussian together with everything needed to map it
// back through the warp. Value type; safe to copy around.
class WarpedPredictive {
public:
    WarpedPredictive(double latent_mean, double latent_sd, warp::WarpParams warp_params,
                     AffineScaler y_scaler)
        : latent_mean_(latent_mean), latent_sd_(latent_sd), warp_(std::move(warp_params)),
          scaler_(y_scaler) {}

    double latent_mean() const { return latent_mean_; }
    double latent_sd() const { return latent_sd_; }

    double median() const;
    double quantile(double q) const;           // inverse-warped normal quantile
    double mean(int quad_order = 20) const;    // Gauss-Hermite expectation of the inverse warp
    double density(double y) const;            // output-space predictive density

private:
    double latent_mean_;
    double latent_sd_;
    warp::WarpParams warp_;
    AffineScaler scaler_;
};

struct WgpModel {
    gp::GpModel latent;            // fitted on z = g(s(y)), zero latent mean
    warp::WarpParams warp_params;
    AffineScaler y_scaler;
    double evidence = 0.0;         // joint value including the Jacobian term
    gp::FitReport report;

    std::vector<WarpedPredictive> predict(const Eigen::MatrixXd& x_test) const;

    // A GP embedded in warped form (identity warp, centering scaler): every
    // predictive quantity reduces to the GP's.
    static WgpModel from_gp(const gp::GpModel& model);
};

// Joint maximum-likelihood fit over kernel and warp parameters; the warp
// starts near the identity so the search begins at the plain-GP solution.
WgpModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
             const optimize::FitConfig& config, const WarpOptions& warp_options = {});

}  // namespace wgpr::wgp
