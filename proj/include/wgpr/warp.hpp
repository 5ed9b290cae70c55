#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace wgpr::warp {

// Parameters of the monotone output transform
//   g(y) = [y] + sum_l a_l * tanh(b_l * y + c_l),  a_l, b_l >= 0,
// where the leading identity term is present iff `include_identity`.
// With the identity term g is strictly increasing and bijective on the reals;
// without it g is non-decreasing with range (-sum a_l, sum a_l).
struct WarpParams {
    Eigen::VectorXd step_sizes;   // a_l
    Eigen::VectorXd steepnesses;  // b_l
    Eigen::VectorXd positions;    // c_l
    bool include_identity = true;

    int steps() const { return static_cast<int>(step_sizes.size()); }
    void validate() const;

    // All step sizes zero, identity on: g(y) = y.
    static WarpParams identity(int steps = 1);

    // Training start near the identity map: a_l = 0.01, b_l = 1, tanh centers
    // spread uniformly over [lo, hi].
    static WarpParams near_identity_init(int steps, double lo = -1.0, double hi = 1.0);
};

double forward(const WarpParams& params, double y);
double derivative(const WarpParams& params, double y);

// Solves forward(y) = z by safeguarded Newton with a bisection fallback;
// residual target 1e-10 * max(1, |z|), at most 200 iterations. Without the
// identity term z must lie strictly inside the attainable range.
double inverse(const WarpParams& params, double z);

Eigen::VectorXd forward(const WarpParams& params, const Eigen::VectorXd& y);
Eigen::VectorXd derivative(const WarpParams& params, const Eigen::VectorXd& y);

// Derivatives of g(y) and g'(y) with respect to the raw parameters, laid out
// as [a_1..a_L, b_1..b_L, c_1..c_L]; used by the joint likelihood gradient.
struct ParamJacobian {
    Eigen::VectorXd d_forward;
    Eigen::VectorXd d_derivative;
};
ParamJacobian param_jacobian(const WarpParams& params, double y);

// Two-column CSV (y, g(y)) over the given grid; the conventional grid is the
// normalized target range [-1, 1].
void write_curve_csv(std::ostream& out, const WarpParams& params, const Eigen::VectorXd& grid);
void write_curve_csv(const std::string& path, const WarpParams& params, const Eigen::VectorXd& grid);

}  // namespace wgpr::warp
