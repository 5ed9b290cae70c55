#include "wgpr/wgp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <utility>

#include "wgpr/errors.hpp"
#include "wgpr/stats.hpp"

namespace wgpr::wgp {

Eigen::VectorXd AffineScaler::to_scaled(const Eigen::VectorXd& y) const {
    return (y.array() - shift) / scale;
}

AffineScaler AffineScaler::unit_range(const Eigen::VectorXd& y) {
    if (y.size() == 0) throw InvalidInputError("unit_range: empty target vector");
    const double lo = y.minCoeff();
    const double hi = y.maxCoeff();
    AffineScaler s;
    s.shift = 0.5 * (lo + hi);
    s.scale = 0.5 * (hi - lo);
    if (s.scale <= 0.0) s.scale = 1.0;  // constant targets: center only
    return s;
}

namespace {

// Parameter vector layout shared by the joint likelihood and the fitter:
// [kernel logs | log a_1..L | log b_1..L | c_1..L].
int joint_dim(int input_dim, int steps) { return (input_dim + 2) + 3 * steps; }

Eigen::VectorXd pack(const kernel::KernelParams& kp, const warp::WarpParams& wp) {
    const int L = wp.steps();
    Eigen::VectorXd v(joint_dim(kp.dim(), L));
    v.head(kp.dim() + 2) = kp.to_log_vector();
    for (int l = 0; l < L; ++l) {
        v[kp.dim() + 2 + l] = std::log(wp.step_sizes[l]);
        v[kp.dim() + 2 + L + l] = std::log(wp.steepnesses[l]);
        v[kp.dim() + 2 + 2 * L + l] = wp.positions[l];
    }
    return v;
}

void unpack(const Eigen::VectorXd& v, int input_dim, int steps, bool include_identity,
            kernel::KernelParams& kp, warp::WarpParams& wp) {
    kp = kernel::KernelParams::from_log_vector(v.head(input_dim + 2));
    wp.step_sizes = v.segment(input_dim + 2, steps).array().exp();
    wp.steepnesses = v.segment(input_dim + 2 + steps, steps).array().exp();
    wp.positions = v.segment(input_dim + 2 + 2 * steps, steps);
    wp.include_identity = include_identity;
}

}  // namespace

JointValue log_likelihood(const kernel::KernelParams& kernel_params,
                          const warp::WarpParams& warp_params, const Eigen::MatrixXd& x,
                          const Eigen::VectorXd& y) {
    kernel_params.validate();
    warp_params.validate();
    if (x.rows() != y.size())
        throw InvalidInputError("log_likelihood: row count of x does not match y");

    const int n = static_cast<int>(y.size());
    const int L = warp_params.steps();

    const Eigen::VectorXd z = warp::forward(warp_params, y);
    const Eigen::VectorXd gprime = warp::derivative(warp_params, y);
    for (int i = 0; i < n; ++i) {
        if (!(gprime[i] > 0.0)) {
            std::ostringstream msg;
            msg << "log_likelihood: warp derivative " << gprime[i] << " at observation " << i
                << " is not positive; the change-of-variables term is undefined";
            throw DegenerateWarpError(msg.str());
        }
    }

    const gp::Evidence ev = gp::log_marginal_likelihood(kernel_params, x, z);

    JointValue out;
    out.value = ev.value + gprime.array().log().sum();
    out.gradient.resize(joint_dim(kernel_params.dim(), L));
    out.gradient.head(kernel_params.dim() + 2) = ev.gradient;

    // d/dpsi [ -z^T C^{-1} z / 2 ] = -alpha^T dz/dpsi, plus the Jacobian-term
    // derivative sum_i (dg'_i/dpsi) / g'_i, accumulated per observation.
    Eigen::VectorXd warp_grad = Eigen::VectorXd::Zero(3 * L);
    for (int i = 0; i < n; ++i) {
        const warp::ParamJacobian jac = warp::param_jacobian(warp_params, y[i]);
        warp_grad.noalias() += -ev.alpha[i] * jac.d_forward + jac.d_derivative / gprime[i];
    }
    // Chain rule for the log-reparameterized positives.
    for (int l = 0; l < L; ++l) {
        warp_grad[l] *= warp_params.step_sizes[l];
        warp_grad[L + l] *= warp_params.steepnesses[l];
    }
    out.gradient.tail(3 * L) = warp_grad;
    return out;
}

double WarpedPredictive::median() const {
    return scaler_.to_output(warp::inverse(warp_, latent_mean_));
}

double WarpedPredictive::quantile(double q) const {
    const double zq = latent_mean_ + latent_sd_ * stats::normal_quantile(q);
    return scaler_.to_output(warp::inverse(warp_, zq));
}

double WarpedPredictive::mean(int quad_order) const {
    const stats::GaussHermiteRule rule = stats::gauss_hermite(quad_order);
    try {
        const double scaled = stats::gauss_hermite_expectation(
            rule, latent_mean_, latent_sd_,
            [this](double z) { return warp::inverse(warp_, z); });
        return scaler_.to_output(scaled);
    } catch (const RangeErrorW& e) {
        throw DegenerateWarpError(std::string("predictive mean: quadrature node left the "
                                              "attainable warp range: ") +
                                  e.what());
    }
}

double WarpedPredictive::density(double y) const {
    const double y_scaled = scaler_.to_scaled(y);
    const double z = warp::forward(warp_, y_scaled);
    const double jac = warp::derivative(warp_, y_scaled);
    return stats::normal_pdf(z, latent_mean_, latent_sd_) * jac / scaler_.scale;
}

std::vector<WarpedPredictive> WgpModel::predict(const Eigen::MatrixXd& x_test) const {
    const std::vector<gp::PredictiveDist> latent_pred = latent.predict(x_test);
    std::vector<WarpedPredictive> out;
    out.reserve(latent_pred.size());
    for (const gp::PredictiveDist& p : latent_pred)
        out.emplace_back(p.mean, std::sqrt(p.variance), warp_params, y_scaler);
    return out;
}

WgpModel WgpModel::from_gp(const gp::GpModel& model) {
    WgpModel out;
    out.warp_params = warp::WarpParams::identity();
    out.y_scaler.shift = model.y_mean;
    out.y_scaler.scale = 1.0;
    // The latent GP sees exactly the centered targets the plain GP trains on.
    out.latent = model;
    out.latent.y_mean = 0.0;
    out.evidence = model.evidence;
    out.report = model.report;
    return out;
}

WgpModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
             const optimize::FitConfig& config, const WarpOptions& warp_options) {
    config.validate();
    if (x.rows() != y.size()) throw InvalidInputError("wgp::fit: row count of x does not match y");
    if (y.size() < 2) throw InvalidInputError("wgp::fit: need at least two observations");
    if (!x.allFinite() || !y.allFinite())
        throw InvalidInputError("wgp::fit: inputs contain non-finite values");
    if (warp_options.steps < 1) throw InvalidInputError("wgp::fit: warp needs at least one step");

    const gp::StandardScaler x_scaler = gp::StandardScaler::fit(x);
    const Eigen::MatrixXd xs = x_scaler.transform(x);
    const AffineScaler y_scaler = AffineScaler::unit_range(y);
    const Eigen::VectorXd ys = y_scaler.to_scaled(y);

    const int L = warp_options.steps;
    const int D = static_cast<int>(x.cols());
    const warp::WarpParams warp0 = [&] {
        warp::WarpParams w = warp::WarpParams::near_identity_init(L);
        w.include_identity = warp_options.include_identity;
        return w;
    }();
    const kernel::KernelParams kernel0 =
        gp::initial_kernel_params(xs, warp::forward(warp0, ys));
    const Eigen::VectorXd base = pack(kernel0, warp0);

    const optimize::Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
        kernel::KernelParams kp;
        warp::WarpParams wp;
        unpack(v, D, L, warp_options.include_identity, kp, wp);
        try {
            const JointValue jv = log_likelihood(kp, wp, xs, ys);
            grad = jv.gradient;
            return jv.value;
        } catch (const NumericalFailureError&) {
        } catch (const DegenerateWarpError&) {
        } catch (const InvalidInputError&) {
        }
        // rejected trial point; the line search backs off
        grad = Eigen::VectorXd::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
        return std::numeric_limits<double>::quiet_NaN();
    };

    gp::FitReport report;
    bool have_best = false;
    optimize::MaximizeResult best;
    int best_restart = -1;

    for (int r = 0; r < config.restarts; ++r) {
        Eigen::VectorXd start = base;
        if (r > 0) {
            std::mt19937_64 rng(stats::derive_seed(config.seed, static_cast<std::uint64_t>(r)));
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            start[0] += u(rng);                                    // log nu
            for (int d = 0; d < D; ++d) start[1 + d] += 0.7 * u(rng);
            start[1 + D] += u(rng);                                // log noise
            for (int l = 0; l < L; ++l) start[D + 2 + l] += u(rng);            // log a
            for (int l = 0; l < L; ++l) start[D + 2 + L + l] += 0.5 * u(rng);  // log b
            for (int l = 0; l < L; ++l) start[D + 2 + 2 * L + l] += 0.3 * u(rng);
        }

        gp::RestartDiagnostic diag;
        diag.restart = r;
        try {
            const optimize::MaximizeResult res = optimize::maximize(objective, start, config);
            diag.initial_value = res.trace.front();
            diag.final_value = res.value;
            diag.iterations = res.iterations;
            diag.converged = res.converged;
            diag.degraded = res.degraded;
            if (!have_best || res.value > best.value) {
                best = res;
                best_restart = r;
                have_best = true;
            }
        } catch (const Error& e) {
            diag.error = e.what();
        }
        report.restarts.push_back(std::move(diag));
    }

    if (!have_best) {
        std::vector<std::string> details;
        for (const gp::RestartDiagnostic& d : report.restarts) details.push_back(d.error);
        throw FitFailureError("wgp::fit: every restart failed", std::move(details));
    }
    report.best_restart = best_restart;
    report.best_trace = best.trace;

    kernel::KernelParams kp;
    warp::WarpParams wp;
    unpack(best.parameters, D, L, warp_options.include_identity, kp, wp);

    WgpModel model;
    model.warp_params = wp;
    model.y_scaler = y_scaler;
    // The latent targets are exactly the warped, scaled observations.
    model.latent = gp::GpModel::assemble(x_scaler, xs, warp::forward(wp, ys), 0.0, kp);
    model.evidence = best.value;
    model.report = std::move(report);
    return model;
}

}  // namespace wgpr::wgp
