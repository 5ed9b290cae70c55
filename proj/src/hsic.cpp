#include "wgpr/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "wgpr/errors.hpp"
#include "wgpr/stats.hpp"

namespace wgpr::hsic {

namespace {

Eigen::MatrixXd gaussian_gram(const Eigen::VectorXd& u, double bandwidth) {
    const Eigen::Index n = u.size();
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = u[i] - u[j];
            k(i, j) = std::exp(-d * d * inv);
            k(j, i) = k(i, j);
        }
    }
    return k;
}

void double_center(Eigen::MatrixXd& k) {
    const Eigen::VectorXd row_means = k.rowwise().mean();
    const double grand = row_means.mean();
    k.colwise() -= row_means;
    k.rowwise() -= row_means.transpose();
    k.array() += grand;
}

}  // namespace

double median_bandwidth(const Eigen::VectorXd& u) {
    const Eigen::Index n = u.size();
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) dists.push_back(std::abs(u[i] - u[j]));
    if (dists.empty()) return 1.0;
    const double med = stats::median(std::move(dists));
    return med > 0.0 ? med : 1.0;
}

HsicResult hsic_statistic(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                          std::optional<std::pair<double, double>> bandwidths) {
    if (u.size() != v.size()) throw InvalidInputError("hsic_statistic: length mismatch");
    if (u.size() < 4) throw InvalidInputError("hsic_statistic: need at least 4 samples");
    if (!u.allFinite() || !v.allFinite())
        throw InvalidInputError("hsic_statistic: non-finite input");

    HsicResult res;
    res.n = static_cast<int>(u.size());
    if (bandwidths) {
        res.bandwidth_x = bandwidths->first;
        res.bandwidth_y = bandwidths->second;
        if (!(res.bandwidth_x > 0.0) || !(res.bandwidth_y > 0.0))
            throw InvalidInputError("hsic_statistic: bandwidths must be positive");
    } else {
        res.bandwidth_x = median_bandwidth(u);
        res.bandwidth_y = median_bandwidth(v);
    }

    Eigen::MatrixXd k = gaussian_gram(u, res.bandwidth_x);
    Eigen::MatrixXd l = gaussian_gram(v, res.bandwidth_y);
    double_center(k);
    double_center(l);
    // tr(K H L H) = sum (HKH) .* (HLH) because H is idempotent.
    const double trace = k.cwiseProduct(l).sum();

    double stat = trace / (static_cast<double>(res.n) * static_cast<double>(res.n));
    if (stat < 0.0) {
        if (stat < -1e-12)
            throw NumericalFailureError("hsic_statistic: statistic below numerical slack");
        stat = 0.0;
    }
    res.statistic = stat;
    return res;
}

double permutation_threshold(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double level,
                             int permutations, std::uint64_t seed) {
    if (!(level > 0.0 && level < 1.0))
        throw InvalidInputError("permutation_threshold: level must lie in (0, 1)");
    if (permutations < 1)
        throw InvalidInputError("permutation_threshold: need at least one permutation");

    std::vector<double> stats_perm(static_cast<std::size_t>(permutations));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(v.size()));
    Eigen::VectorXd shuffled(v.size());
    for (int p = 0; p < permutations; ++p) {
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        std::mt19937_64 rng(stats::derive_seed(seed, static_cast<std::uint64_t>(p)));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (Eigen::Index i = 0; i < v.size(); ++i) shuffled[i] = v[idx[static_cast<std::size_t>(i)]];
        stats_perm[static_cast<std::size_t>(p)] = hsic_statistic(u, shuffled).statistic;
    }
    std::sort(stats_perm.begin(), stats_perm.end());
    const auto rank = static_cast<std::size_t>(std::clamp(
        static_cast<long long>(std::ceil(level * permutations)) - 1, 0LL,
        static_cast<long long>(permutations - 1)));
    return stats_perm[rank];
}

}  // namespace wgpr::hsic
