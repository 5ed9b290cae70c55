#pragma once

#include <Eigen/Dense>

namespace wgpr::linalg {

struct JitteredCholesky {
    Eigen::MatrixXd lower;     // L with L L^T = M + jitter * I
    double jitter = 0.0;       // 0 when the factorization succeeded untouched
};

// Cholesky with escalating diagonal jitter. Starts at 1e-10 * mean(diag),
// multiplies by 10 up to 1e-4 * mean(diag); throws NumericalFailureError
// (carrying the last attempted jitter) if the ladder is exhausted.
JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& m);

// Solve L x = b and L^T x = b for lower-triangular L.
Eigen::VectorXd solve_lower(const Eigen::MatrixXd& lower, const Eigen::VectorXd& b);
Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& b);
Eigen::VectorXd solve_cholesky(const Eigen::MatrixXd& lower, const Eigen::VectorXd& b);

// (M + jitter I)^{-1} from its Cholesky factor.
Eigen::MatrixXd cholesky_inverse(const Eigen::MatrixXd& lower);

double log_det_from_cholesky(const Eigen::MatrixXd& lower);

}  // namespace wgpr::linalg
