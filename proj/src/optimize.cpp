#include "wgpr/optimize.hpp"

#include <cmath>
#include <deque>

#include "wgpr/errors.hpp"

namespace wgpr::optimize {

void FitConfig::validate() const {
    if (restarts < 1) throw InvalidInputError("FitConfig: restarts must be >= 1");
    if (max_iterations < 1) throw InvalidInputError("FitConfig: max_iterations must be >= 1");
    if (!(relative_tolerance > 0.0))
        throw InvalidInputError("FitConfig: relative_tolerance must be > 0");
}

namespace {

constexpr double kArmijoC1 = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 50;
constexpr int kMemory = 10;
constexpr double kGradTol = 1e-10;

struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& grad, const std::deque<Pair>& history) {
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        alpha[i] = history[i].rho * history[i].s.dot(q);
        q -= alpha[i] * history[i].y;
    }
    if (!history.empty()) {
        const Pair& last = history.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double beta = history[i].rho * history[i].y.dot(q);
        q += (alpha[i] - beta) * history[i].s;
    }
    return -q;
}

}  // namespace

MaximizeResult maximize(const Objective& objective, const Eigen::VectorXd& initial,
                        const FitConfig& config) {
    config.validate();

    // Work on the negation so the inner loop is a plain minimizer.
    const auto phi = [&objective](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const double v = objective(x, grad);
        grad = -grad;
        return -v;
    };

    Eigen::VectorXd x = initial;
    Eigen::VectorXd grad(x.size());
    double fx = phi(x, grad);
    if (!std::isfinite(fx) || !grad.allFinite())
        throw InvalidInputError("optimize::maximize: non-finite objective or gradient at start");

    MaximizeResult result;
    result.trace.push_back(-fx);

    std::deque<Pair> history;
    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        if (grad.lpNorm<Eigen::Infinity>() <= kGradTol) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd direction = lbfgs_direction(grad, history);
        double slope = grad.dot(direction);
        if (!(slope < 0.0)) {  // not a descent direction; reset to steepest descent
            history.clear();
            direction = -grad;
            slope = grad.dot(direction);
        }

        double step = history.empty() ? 1.0 / std::max(1.0, grad.norm()) : 1.0;
        Eigen::VectorXd x_new, grad_new(x.size());
        double fx_new = fx;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            x_new = x + step * direction;
            fx_new = phi(x_new, grad_new);
            if (std::isfinite(fx_new) && grad_new.allFinite() &&
                fx_new <= fx + kArmijoC1 * step * slope) {
                accepted = true;
                break;
            }
            step *= kBacktrack;
        }
        if (!accepted) {
            result.degraded = true;
            break;
        }

        Pair pair{x_new - x, grad_new - grad, 0.0};
        const double sy = pair.s.dot(pair.y);
        if (sy > 1e-10 * pair.s.norm() * pair.y.norm()) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (history.size() > kMemory) history.pop_front();
        }

        const double improvement = fx - fx_new;
        x = std::move(x_new);
        grad = std::move(grad_new);
        fx = fx_new;
        result.trace.push_back(-fx);

        if (improvement <= config.relative_tolerance * std::max(1.0, std::abs(fx))) {
            ++iter;
            result.converged = true;
            break;
        }
    }

    result.parameters = std::move(x);
    result.value = -fx;
    result.iterations = iter;
    return result;
}

}  // namespace wgpr::optimize
