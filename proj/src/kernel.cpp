#include "wgpr/kernel.hpp"

#include <cmath>
#include <string>

#include "wgpr/errors.hpp"
#include "wgpr/linalg.hpp"

namespace wgpr::kernel {

void KernelParams::validate() const {
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
        throw InvalidInputError("KernelParams: signal variance must be positive and finite");
    if (lengthscales.size() == 0)
        throw InvalidInputError("KernelParams: at least one lengthscale required");
    for (Eigen::Index d = 0; d < lengthscales.size(); ++d)
        if (!(lengthscales[d] > 0.0) || !std::isfinite(lengthscales[d]))
            throw InvalidInputError("KernelParams: lengthscale " + std::to_string(d) +
                                    " must be positive and finite");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
        throw InvalidInputError("KernelParams: noise variance must be non-negative and finite");
}

Eigen::VectorXd KernelParams::to_log_vector() const {
    Eigen::VectorXd v(dim() + 2);
    v[0] = std::log(signal_variance);
    for (int d = 0; d < dim(); ++d) v[1 + d] = std::log(lengthscales[d]);
    v[dim() + 1] = std::log(noise_variance);
    return v;
}

KernelParams KernelParams::from_log_vector(const Eigen::VectorXd& v) {
    if (v.size() < 3)
        throw InvalidInputError("KernelParams: log vector needs at least 3 entries");
    KernelParams p;
    p.signal_variance = std::exp(v[0]);
    p.lengthscales = v.segment(1, v.size() - 2).array().exp();
    p.noise_variance = std::exp(v[v.size() - 1]);
    return p;
}

double eval(const KernelParams& params, const Eigen::VectorXd& x, const Eigen::VectorXd& x_other) {
    if (x.size() != params.lengthscales.size() || x_other.size() != params.lengthscales.size())
        throw InvalidInputError("kernel::eval: input dimension does not match lengthscale count");
    double exponent = 0.0;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double diff = x[d] - x_other[d];
        const double s = params.lengthscales[d];
        exponent += diff * diff / (2.0 * s * s);
    }
    return params.signal_variance * std::exp(-exponent);
}

Eigen::MatrixXd gram_raw(const KernelParams& params, const Eigen::MatrixXd& x, bool add_noise) {
    if (x.rows() < 1) throw InvalidInputError("kernel::gram: need at least one row");
    if (x.cols() != params.lengthscales.size())
        throw InvalidInputError("kernel::gram: input dimension does not match lengthscale count");
    if (!x.allFinite()) throw InvalidInputError("kernel::gram: non-finite input");

    const Eigen::Index n = x.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = params.signal_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = eval(params, x.row(i), x.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    if (add_noise) k.diagonal().array() += params.noise_variance;
    return k;
}

GramMatrix gram(const KernelParams& params, const Eigen::MatrixXd& x, bool add_noise) {
    GramMatrix g;
    g.entries = gram_raw(params, x, add_noise);
    auto chol = linalg::jittered_cholesky(g.entries);
    g.jitter_applied = chol.jitter;
    if (chol.jitter > 0.0) g.entries.diagonal().array() += chol.jitter;
    return g;
}

std::vector<Eigen::MatrixXd> gram_gradients(const KernelParams& params, const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd noiseless = gram_raw(params, x, false);
    const Eigen::Index n = x.rows();
    const int dim = params.dim();

    std::vector<Eigen::MatrixXd> grads;
    grads.reserve(dim + 2);
    grads.push_back(noiseless);  // d/dlog nu

    for (int d = 0; d < dim; ++d) {
        const double s2 = params.lengthscales[d] * params.lengthscales[d];
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            g(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double diff = x(i, d) - x(j, d);
                const double v = noiseless(i, j) * diff * diff / s2;
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        grads.push_back(std::move(g));
    }

    grads.push_back(params.noise_variance *
                    Eigen::MatrixXd::Identity(n, n));  // d/dlog sigma_n^2
    return grads;
}

}  // namespace wgpr::kernel
