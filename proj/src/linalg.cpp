#include "wgpr/linalg.hpp"

#include <cmath>
#include <string>

#include "wgpr/errors.hpp"

namespace wgpr::linalg {

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidInputError("jittered_cholesky: matrix must be square and non-empty");

    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success)
        return {Eigen::MatrixXd(llt.matrixL()), 0.0};

    const double scale = m.diagonal().mean();
    const double base = (scale > 0.0 ? scale : 1.0);
    double jitter = 1e-10 * base;
    const double max_jitter = 1e-4 * base;
    while (jitter <= max_jitter * (1.0 + 1e-12)) {
        Eigen::MatrixXd shifted = m;
        shifted.diagonal().array() += jitter;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success)
            return {Eigen::MatrixXd(llt.matrixL()), jitter};
        jitter *= 10.0;
    }
    throw NumericalFailureError(
        "jittered_cholesky: factorization failed after escalating jitter to " +
            std::to_string(max_jitter),
        max_jitter);
}

Eigen::VectorXd solve_lower(const Eigen::MatrixXd& lower, const Eigen::VectorXd& b) {
    return lower.triangularView<Eigen::Lower>().solve(b);
}

Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& b) {
    return lower.triangularView<Eigen::Lower>().solve(b);
}

Eigen::VectorXd solve_cholesky(const Eigen::MatrixXd& lower, const Eigen::VectorXd& b) {
    Eigen::VectorXd x = lower.triangularView<Eigen::Lower>().solve(b);
    return lower.transpose().triangularView<Eigen::Upper>().solve(x);
}

Eigen::MatrixXd cholesky_inverse(const Eigen::MatrixXd& lower) {
    const Eigen::Index n = lower.rows();
    Eigen::MatrixXd inv_l = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    return inv_l.transpose() * inv_l;
}

double log_det_from_cholesky(const Eigen::MatrixXd& lower) {
    return 2.0 * lower.diagonal().array().log().sum();
}

}  // namespace wgpr::linalg
