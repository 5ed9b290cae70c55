#include "wgpr/gp.hpp"

#include <cmath>
#include <random>

#include "wgpr/errors.hpp"
#include "wgpr/linalg.hpp"
#include "wgpr/stats.hpp"

namespace wgpr::gp {

StandardScaler StandardScaler::fit(const Eigen::MatrixXd& x) {
    StandardScaler s;
    s.mean = x.colwise().mean();
    s.sd.resize(x.cols());
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
        const double var =
            (x.col(d).array() - s.mean[d]).square().sum() / static_cast<double>(x.rows());
        s.sd[d] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

StandardScaler StandardScaler::identity(int dim) {
    StandardScaler s;
    s.mean = Eigen::VectorXd::Zero(dim);
    s.sd = Eigen::VectorXd::Ones(dim);
    return s;
}

Eigen::MatrixXd StandardScaler::transform(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size())
        throw InvalidInputError("StandardScaler: dimension mismatch");
    return (x.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
}

Evidence log_marginal_likelihood(const kernel::KernelParams& params, const Eigen::MatrixXd& x,
                                 const Eigen::VectorXd& y) {
    if (x.rows() != y.size() || x.rows() < 1)
        throw InvalidInputError("log_marginal_likelihood: row/target count mismatch");
    const Eigen::Index n = x.rows();
    const int dim = params.dim();

    const Eigen::MatrixXd noiseless = kernel::gram_raw(params, x, false);
    Eigen::MatrixXd c = noiseless;
    c.diagonal().array() += params.noise_variance;
    const auto chol = linalg::jittered_cholesky(c);

    Evidence ev;
    ev.alpha = linalg::solve_cholesky(chol.lower, y);
    ev.value = -0.5 * y.dot(ev.alpha) - 0.5 * linalg::log_det_from_cholesky(chol.lower) -
               0.5 * static_cast<double>(n) * stats::kLogTwoPi;

    // d/dtheta log evidence = 0.5 * sum( (alpha alpha^T - C^{-1}) .* dC/dtheta )
    const Eigen::MatrixXd a =
        ev.alpha * ev.alpha.transpose() - linalg::cholesky_inverse(chol.lower);

    ev.gradient.resize(dim + 2);
    ev.gradient[0] = 0.5 * a.cwiseProduct(noiseless).sum();
    for (int d = 0; d < dim; ++d) {
        const double s2 = params.lengthscales[d] * params.lengthscales[d];
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const double diff = x(i, d) - x(j, d);
                acc += a(i, j) * noiseless(i, j) * diff * diff;
            }
        ev.gradient[1 + d] = acc / s2;  // off-diagonal pairs, doubled by symmetry
    }
    ev.gradient[dim + 1] = 0.5 * params.noise_variance * a.trace();
    return ev;
}

GpModel GpModel::assemble(StandardScaler x_scaler, Eigen::MatrixXd x_standardized,
                          Eigen::VectorXd y_centered, double y_mean,
                          kernel::KernelParams params, const Eigen::VectorXd* stored_alpha) {
    params.validate();
    GpModel m;
    m.x_scaler = std::move(x_scaler);
    m.x_train = std::move(x_standardized);
    m.y_centered = std::move(y_centered);
    m.y_mean = y_mean;
    m.params = std::move(params);

    Eigen::MatrixXd c = kernel::gram_raw(m.params, m.x_train, true);
    auto chol = linalg::jittered_cholesky(c);
    m.chol_lower = std::move(chol.lower);
    m.jitter = chol.jitter;
    m.alpha = stored_alpha ? *stored_alpha : linalg::solve_cholesky(m.chol_lower, m.y_centered);

    const Eigen::Index n = m.x_train.rows();
    m.evidence = -0.5 * m.y_centered.dot(m.alpha) -
                 0.5 * linalg::log_det_from_cholesky(m.chol_lower) -
                 0.5 * static_cast<double>(n) * stats::kLogTwoPi;
    return m;
}

std::vector<PredictiveDist> GpModel::predict(const Eigen::MatrixXd& x_test_raw) const {
    if (x_test_raw.cols() != x_scaler.mean.size())
        throw InvalidInputError("GpModel::predict: input dimension mismatch");
    const Eigen::MatrixXd x_test = x_scaler.transform(x_test_raw);
    const Eigen::Index n = x_train.rows();
    const Eigen::Index m = x_test.rows();

    std::vector<PredictiveDist> out(m);
    constexpr Eigen::Index chunk = 1024;
    Eigen::MatrixXd cross(n, std::min(chunk, m));
    for (Eigen::Index start = 0; start < m; start += chunk) {
        const Eigen::Index cols = std::min(chunk, m - start);
        cross.resize(n, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                cross(i, j) = kernel::eval(params, x_train.row(i), x_test.row(start + j));

        const Eigen::MatrixXd v = linalg::solve_lower(chol_lower, cross);
        for (Eigen::Index j = 0; j < cols; ++j) {
            PredictiveDist& p = out[start + j];
            p.mean = cross.col(j).dot(alpha) + y_mean;
            p.variance = std::max(
                params.noise_variance + params.signal_variance - v.col(j).squaredNorm(), 0.0);
        }
    }
    return out;
}

kernel::KernelParams initial_kernel_params(const Eigen::MatrixXd& x_standardized,
                                           const Eigen::VectorXd& y_centered) {
    kernel::KernelParams p;
    const double var_y = std::max(stats::variance(y_centered), 1e-8);
    p.signal_variance = var_y;
    p.noise_variance = 0.1 * var_y;

    const Eigen::Index n = x_standardized.rows();
    const Eigen::Index stride = n > 1500 ? n / 1000 : 1;  // cap the O(n^2) heuristic
    p.lengthscales.resize(x_standardized.cols());
    for (Eigen::Index d = 0; d < x_standardized.cols(); ++d) {
        std::vector<double> dists;
        for (Eigen::Index i = 0; i < n; i += stride)
            for (Eigen::Index j = i + stride; j < n; j += stride)
                dists.push_back(std::abs(x_standardized(i, d) - x_standardized(j, d)));
        const double med = dists.empty() ? 1.0 : stats::median(std::move(dists));
        p.lengthscales[d] = med > 0.0 ? med : 1.0;
    }
    return p;
}

GpModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
            const optimize::FitConfig& config) {
    config.validate();
    if (x.rows() != y.size() || x.rows() < 2)
        throw InvalidInputError("gp::fit: need at least two rows with matching targets");
    if (!x.allFinite() || !y.allFinite())
        throw InvalidInputError("gp::fit: non-finite data");

    const StandardScaler scaler = StandardScaler::fit(x);
    const Eigen::MatrixXd xs = scaler.transform(x);
    const double y_mean = stats::mean(y);
    const Eigen::VectorXd yc = y.array() - y_mean;

    const Eigen::VectorXd base_init = initial_kernel_params(xs, yc).to_log_vector();

    const optimize::Objective objective = [&xs, &yc](const Eigen::VectorXd& v,
                                                     Eigen::VectorXd& grad) -> double {
        try {
            const Evidence ev =
                log_marginal_likelihood(kernel::KernelParams::from_log_vector(v), xs, yc);
            grad = ev.gradient;
            return ev.value;
        } catch (const NumericalFailureError&) {
            grad = Eigen::VectorXd::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::quiet_NaN();
        } catch (const InvalidInputError&) {
            // exp overflow/underflow in the trial step; let the line search back off
            grad = Eigen::VectorXd::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    FitReport report;
    Eigen::VectorXd best_params;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.restarts; ++r) {
        Eigen::VectorXd init = base_init;
        if (r > 0) {
            std::mt19937_64 rng(stats::derive_seed(config.seed, static_cast<std::uint64_t>(r)));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            init[0] += u(rng);
            for (Eigen::Index d = 1; d < init.size() - 1; ++d) init[d] += 0.7 * u(rng);
            init[init.size() - 1] += u(rng);
        }
        RestartDiagnostic diag;
        diag.restart = r;
        try {
            const auto res = optimize::maximize(objective, init, config);
            diag.initial_value = res.trace.front();
            diag.final_value = res.value;
            diag.iterations = res.iterations;
            diag.converged = res.converged;
            diag.degraded = res.degraded;
            if (res.value > best_value) {
                best_value = res.value;
                best_params = res.parameters;
                report.best_restart = r;
                report.best_trace = res.trace;
            }
        } catch (const Error& e) {
            diag.error = e.what();
        }
        report.restarts.push_back(std::move(diag));
    }
    if (report.best_restart < 0) {
        std::vector<std::string> diags;
        for (const auto& d : report.restarts)
            diags.push_back("restart " + std::to_string(d.restart) + ": " + d.error);
        throw FitFailureError("gp::fit: every restart failed", std::move(diags));
    }

    GpModel model = GpModel::assemble(scaler, xs, yc, y_mean,
                                      kernel::KernelParams::from_log_vector(best_params));
    model.report = std::move(report);
    return model;
}

}  // namespace wgpr::gp
