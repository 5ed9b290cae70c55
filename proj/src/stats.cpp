#include "wgpr/stats.hpp"

#include <algorithm>
#include <cmath>

#include "wgpr/errors.hpp"

namespace wgpr::stats {

double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace {

// Acklam's rational approximation, |relative error| < 1.15e-9 before refinement.
double normal_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidInputError("normal_quantile: p must lie strictly in (0, 1)");
    double x = normal_quantile_approx(p);
    // One Halley refinement pushes the result to machine precision.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1) throw InvalidInputError("gauss_hermite: order must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double off = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussHermiteRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(order);
    const double mu0 = std::sqrt(M_PI);  // integral of e^{-t^2}
    for (int i = 0; i < order; ++i) {
        const double q0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * q0 * q0;
    }
    return rule;
}

double mean(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.sum() / static_cast<double>(v.size());
}

double variance(const Eigen::VectorXd& v) {
    if (v.size() == 0) return 0.0;
    const double m = mean(v);
    return (v.array() - m).square().sum() / static_cast<double>(v.size());
}

double sample_skewness(const Eigen::VectorXd& v) {
    const double m = mean(v);
    const double s = std::sqrt(variance(v));
    if (s == 0.0) return 0.0;
    return ((v.array() - m) / s).cube().sum() / static_cast<double>(v.size());
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* defined) {
    if (a.size() != b.size() || a.size() < 2)
        throw InvalidInputError("pearson: vectors must have equal length >= 2");
    const double ma = mean(a), mb = mean(b);
    const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
    const double sa = std::sqrt(da.square().sum()), sb = std::sqrt(db.square().sum());
    if (sa == 0.0 || sb == 0.0) {
        if (defined) *defined = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (defined) *defined = true;
    return (da * db).sum() / (sa * sb);
}

double median(std::vector<double> v) {
    if (v.empty()) throw InvalidInputError("median: empty input");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 over a combined state
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

}  // namespace wgpr::stats
