#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace wgpr::stats {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

double normal_pdf(double x, double mean = 0.0, double sd = 1.0);
double normal_cdf(double x);

// Inverse standard normal CDF, accurate to full double precision
// (rational approximation refined with one Halley step against erfc).
double normal_quantile(double p);

// Nodes and weights for \int e^{-t^2} h(t) dt ~= sum w_i h(t_i),
// computed by Golub-Welsch on the Hermite Jacobi matrix.
struct GaussHermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
GaussHermiteRule gauss_hermite(int order);

// E[phi(Z)] for Z ~ N(mean, sd^2): (1/sqrt(pi)) sum w_i phi(mean + sqrt(2) sd t_i).
template <typename Phi>
double gauss_hermite_expectation(const GaussHermiteRule& rule, double mean, double sd, Phi&& phi) {
    constexpr double inv_sqrt_pi = 0.5641895835477562869;
    constexpr double sqrt2 = 1.4142135623730950488;
    double acc = 0.0;
    for (int i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * phi(mean + sqrt2 * sd * rule.nodes[i]);
    return inv_sqrt_pi * acc;
}

double mean(const Eigen::VectorXd& v);
double variance(const Eigen::VectorXd& v);  // population (1/n)
double sample_skewness(const Eigen::VectorXd& v);

// Pearson correlation; sets *defined to false (and returns NaN) when either
// side has zero variance.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* defined = nullptr);

// Median of the values in v (v is copied; n >= 1).
double median(std::vector<double> v);

// Stateless seed derivation so that sub-tasks (restarts, repeats, folds,
// permutations) get decorrelated deterministic streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace wgpr::stats
