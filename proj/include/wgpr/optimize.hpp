#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace wgpr::optimize {

struct FitConfig {
    int restarts = 5;
    int max_iterations = 500;
    double relative_tolerance = 1e-6;
    std::uint64_t seed = 0;

    void validate() const;
};

// Objective callable: fills `grad` and returns the value at `x`. Returning a
// non-finite value during the search marks the point unacceptable; the line
// search backs off instead of aborting.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct MaximizeResult {
    Eigen::VectorXd parameters;
    double value = 0.0;
    std::vector<double> trace;  // accepted objective values, non-decreasing
    int iterations = 0;
    bool converged = false;     // relative-improvement tolerance reached
    bool degraded = false;      // line search stalled; best-so-far returned
};

// Unconstrained smooth maximization: limited-memory BFGS (memory 10) with
// backtracking Armijo line search on the negated objective. The returned
// value is never below the value at `initial`.
MaximizeResult maximize(const Objective& objective, const Eigen::VectorXd& initial,
                        const FitConfig& config);

}  // namespace wgpr::optimize
