#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace wgpr::hsic {

struct HsicResult {
    double statistic = 0.0;
    double bandwidth_x = 0.0;
    double bandwidth_y = 0.0;
    int n = 0;
};

// Median of the pairwise absolute differences |u_i - u_j|, i < j; falls back
// to 1.0 when the median is zero (e.g. constant or heavily tied samples).
double median_bandwidth(const Eigen::VectorXd& u);

// Biased empirical HSIC (1/n^2) tr(K H L H) with Gaussian kernels
// exp(-(d/bw)^2 / 2) on each sample, H = I - (1/n) 1 1^T. Both Gram matrices
// are double-centered before the elementwise product, so a constant input
// yields exactly zero. Tiny negative results (>= -1e-12) clamp to zero.
HsicResult hsic_statistic(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                          std::optional<std::pair<double, double>> bandwidths = std::nullopt);

// Empirical upper-tail critical value: the `level` quantile (order statistic
// ceil(level * permutations) - 1, zero-based) of the statistic recomputed with
// v shuffled. Deterministic given the seed.
double permutation_threshold(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double level,
                             int permutations, std::uint64_t seed);

}  // namespace wgpr::hsic
