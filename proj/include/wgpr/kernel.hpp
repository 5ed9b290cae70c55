#pragma once

#include <vector>

#include <Eigen/Dense>

namespace wgpr::kernel {

// Hyperparameters of the ARD squared-exponential covariance plus the
// observation noise power. Positivity is the caller's responsibility at
// construction; `validate` enforces it.
struct KernelParams {
    double signal_variance = 1.0;    // nu
    Eigen::VectorXd lengthscales;    // one per input dimension
    double noise_variance = 0.0;     // sigma_n^2

    int dim() const { return static_cast<int>(lengthscales.size()); }
    void validate() const;

    // Packs to / unpacks from the optimizer's log-parameter vector
    // [log nu, log sigma_1 .. log sigma_D, log sigma_n^2].
    Eigen::VectorXd to_log_vector() const;
    static KernelParams from_log_vector(const Eigen::VectorXd& v);
};

struct GramMatrix {
    Eigen::MatrixXd entries;     // includes noise (if requested) and jitter on the diagonal
    double jitter_applied = 0.0;
};

// k(x, x') = nu * exp(-sum_d (x_d - x'_d)^2 / (2 sigma_d^2))
double eval(const KernelParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& x_other);

// Covariance matrix assembly without any stabilization; entries are produced
// by the same scalar `eval` arithmetic, so a brute-force double loop matches
// bit for bit.
Eigen::MatrixXd gram_raw(const KernelParams& params, const Eigen::MatrixXd& x, bool add_noise);

// Assembly plus Cholesky-driven jitter escalation; the returned entries carry
// noise and jitter on the diagonal.
GramMatrix gram(const KernelParams& params, const Eigen::MatrixXd& x, bool add_noise);

// Derivatives of the (noise-free kernel + noise diagonal) matrix with respect
// to the log-parameters, in to_log_vector order:
//   d/dlog nu        = noiseless gram
//   d/dlog sigma_d   = noiseless gram .* sq_dist_d / sigma_d^2
//   d/dlog sigma_n^2 = sigma_n^2 * I
std::vector<Eigen::MatrixXd> gram_gradients(const KernelParams& params, const Eigen::MatrixXd& x);

}  // namespace wgpr::kernel
