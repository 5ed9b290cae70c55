#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgpr/kernel.hpp"
#include "wgpr/optimize.hpp"

namespace wgpr::gp {

// Per-column z-scoring applied to inputs before kernel evaluation.
struct StandardScaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;  // floored at 1 for constant columns

    static StandardScaler fit(const Eigen::MatrixXd& x);
    static StandardScaler identity(int dim);
    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

struct PredictiveDist {
    double mean = 0.0;
    double variance = 0.0;
};

struct RestartDiagnostic {
    int restart = 0;
    double initial_value = 0.0;
    double final_value = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degraded = false;
    std::string error;  // non-empty when the restart failed outright
};

struct FitReport {
    std::vector<RestartDiagnostic> restarts;
    int best_restart = -1;
    std::vector<double> best_trace;
};

struct Evidence {
    double value = 0.0;
    Eigen::VectorXd gradient;  // with respect to the kernel log-parameters
    Eigen::VectorXd alpha;     // (K + sigma_n^2 I)^{-1} y, reused by the warped extension
};

// Log evidence log N(y | 0, K + sigma_n^2 I) of already-centered targets,
// with its gradient in KernelParams::to_log_vector order.
Evidence log_marginal_likelihood(const kernel::KernelParams& params, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y);

struct GpModel {
    StandardScaler x_scaler;
    Eigen::MatrixXd x_train;        // standardized
    Eigen::VectorXd y_centered;
    double y_mean = 0.0;
    kernel::KernelParams params;    // lengthscales in standardized-input units
    Eigen::MatrixXd chol_lower;     // L with L L^T = K + sigma_n^2 I + jitter I
    Eigen::VectorXd alpha;          // (K + sigma_n^2 I)^{-1} y_centered
    double jitter = 0.0;
    double evidence = 0.0;
    FitReport report;

    std::vector<PredictiveDist> predict(const Eigen::MatrixXd& x_test) const;

    // Factorizes and caches alpha for the given state; `stored_alpha`, when
    // present, is trusted instead of being recomputed (serialization path).
    static GpModel assemble(StandardScaler x_scaler, Eigen::MatrixXd x_standardized,
                            Eigen::VectorXd y_centered, double y_mean,
                            kernel::KernelParams params,
                            const Eigen::VectorXd* stored_alpha = nullptr);
};

// Type-II maximum likelihood fit: standardizes inputs, centers targets, and
// maximizes the evidence from `config.restarts` seeded starts.
GpModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
            const optimize::FitConfig& config);

// Initialization heuristics, exposed for the joint warped fit.
kernel::KernelParams initial_kernel_params(const Eigen::MatrixXd& x_standardized,
                                           const Eigen::VectorXd& y_centered);

}  // namespace wgpr::gp
