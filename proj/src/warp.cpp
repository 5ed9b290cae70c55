#include "wgpr/warp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "wgpr/errors.hpp"

namespace wgpr::warp {

namespace {

inline double sech2(double u) {
    const double c = std::cosh(u);
    return 1.0 / (c * c);
}

void check_finite(double y, const char* op) {
    if (!std::isfinite(y)) throw InvalidInputError(std::string(op) + ": non-finite input");
}

}  // namespace

void WarpParams::validate() const {
    const int l = steps();
    if (l < 1) throw InvalidInputError("WarpParams: at least one step required");
    if (steepnesses.size() != l || positions.size() != l)
        throw InvalidInputError("WarpParams: a, b, c must have equal length");
    for (int i = 0; i < l; ++i) {
        if (!(step_sizes[i] >= 0.0) || !std::isfinite(step_sizes[i]))
            throw InvalidInputError("WarpParams: step sizes must be >= 0 and finite");
        if (!(steepnesses[i] >= 0.0) || !std::isfinite(steepnesses[i]))
            throw InvalidInputError("WarpParams: steepnesses must be >= 0 and finite");
        if (!std::isfinite(positions[i]))
            throw InvalidInputError("WarpParams: positions must be finite");
    }
}

WarpParams WarpParams::identity(int steps) {
    WarpParams p;
    p.step_sizes = Eigen::VectorXd::Zero(steps);
    p.steepnesses = Eigen::VectorXd::Ones(steps);
    p.positions = Eigen::VectorXd::Zero(steps);
    p.include_identity = true;
    return p;
}

WarpParams WarpParams::near_identity_init(int steps, double lo, double hi) {
    WarpParams p;
    p.step_sizes = Eigen::VectorXd::Constant(steps, 0.01);
    p.steepnesses = Eigen::VectorXd::Ones(steps);
    p.positions.resize(steps);
    // tanh(b y + c) is centered at y = -c/b; with b = 1 spread the centers
    // uniformly over [lo, hi].
    for (int i = 0; i < steps; ++i) {
        const double center = (steps == 1) ? 0.5 * (lo + hi)
                                           : lo + (hi - lo) * i / static_cast<double>(steps - 1);
        p.positions[i] = -center;
    }
    p.include_identity = true;
    return p;
}

double forward(const WarpParams& params, double y) {
    check_finite(y, "warp::forward");
    double z = params.include_identity ? y : 0.0;
    for (int l = 0; l < params.steps(); ++l)
        z += params.step_sizes[l] * std::tanh(params.steepnesses[l] * y + params.positions[l]);
    return z;
}

double derivative(const WarpParams& params, double y) {
    check_finite(y, "warp::derivative");
    double d = params.include_identity ? 1.0 : 0.0;
    for (int l = 0; l < params.steps(); ++l)
        d += params.step_sizes[l] * params.steepnesses[l] *
             sech2(params.steepnesses[l] * y + params.positions[l]);
    return d;
}

Eigen::VectorXd forward(const WarpParams& params, const Eigen::VectorXd& y) {
    Eigen::VectorXd z(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) z[i] = forward(params, y[i]);
    return z;
}

Eigen::VectorXd derivative(const WarpParams& params, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) d[i] = derivative(params, y[i]);
    return d;
}

double inverse(const WarpParams& params, double z) {
    check_finite(z, "warp::inverse");
    const double bound = params.step_sizes.sum();

    double lo, hi;
    if (params.include_identity) {
        // g(y) = y + bounded term in [-bound, bound], so [z - bound, z + bound]
        // always brackets the root.
        lo = z - bound;
        hi = z + bound;
    } else {
        if (!(std::abs(z) < bound))
            throw RangeErrorW("warp::inverse: target outside the attainable range (-" +
                              std::to_string(bound) + ", " + std::to_string(bound) + ")");
        lo = -1.0;
        hi = 1.0;
        int expand = 0;
        while (forward(params, lo) > z && expand++ < 200) lo *= 2.0;
        while (forward(params, hi) < z && expand++ < 200) hi *= 2.0;
        if (forward(params, lo) > z || forward(params, hi) < z)
            throw NumericalFailureError("warp::inverse: failed to bracket the root");
    }

    const double tol = 1e-10 * std::max(1.0, std::abs(z));
    double y = 0.5 * (lo + hi);
    double dx_old = hi - lo;  // step size two iterations back
    double dx = dx_old;
    for (int it = 0; it < 200; ++it) {
        const double r = forward(params, y) - z;
        if (std::abs(r) < tol) return y;
        if (r > 0.0)
            hi = y;
        else
            lo = y;
        const double d = derivative(params, y);
        // On staircase-shaped warps a pure Newton step can cycle between the
        // two steep flanks of a plateau without ever leaving the bracket, so
        // it is only taken while the steps keep contracting at bisection rate.
        double next;
        if (d > 0.0 && std::abs(2.0 * r) < std::abs(dx_old * d)) {
            next = y - r / d;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        } else {
            next = 0.5 * (lo + hi);
        }
        dx_old = dx;
        dx = std::abs(next - y);
        if (next == y) return y;  // interval collapsed to machine precision
        y = next;
    }
    if (std::abs(forward(params, y) - z) < 1e-6 * std::max(1.0, std::abs(z))) return y;
    throw NumericalFailureError("warp::inverse: no convergence after 200 iterations");
}

ParamJacobian param_jacobian(const WarpParams& params, double y) {
    check_finite(y, "warp::param_jacobian");
    const int l = params.steps();
    ParamJacobian jac;
    jac.d_forward.resize(3 * l);
    jac.d_derivative.resize(3 * l);
    for (int i = 0; i < l; ++i) {
        const double a = params.step_sizes[i];
        const double b = params.steepnesses[i];
        const double u = b * y + params.positions[i];
        const double t = std::tanh(u);
        const double s2 = sech2(u);
        jac.d_forward[i] = t;                  // d g / d a
        jac.d_forward[l + i] = a * y * s2;     // d g / d b
        jac.d_forward[2 * l + i] = a * s2;     // d g / d c
        jac.d_derivative[i] = b * s2;                                // d g' / d a
        jac.d_derivative[l + i] = a * s2 * (1.0 - 2.0 * b * y * t);  // d g' / d b
        jac.d_derivative[2 * l + i] = -2.0 * a * b * s2 * t;         // d g' / d c
    }
    return jac;
}

void write_curve_csv(std::ostream& out, const WarpParams& params, const Eigen::VectorXd& grid) {
    out << "y,warped\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        out << grid[i] << ',' << forward(params, grid[i]) << '\n';
}

void write_curve_csv(const std::string& path, const WarpParams& params,
                     const Eigen::VectorXd& grid) {
    std::ofstream out(path);
    if (!out) throw DataError("warp::write_curve_csv: cannot open " + path);
    write_curve_csv(out, params, grid);
}

}  // namespace wgpr::warp
