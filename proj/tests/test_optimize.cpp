#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "test_support.hpp"
#include "wgpr/errors.hpp"
#include "wgpr/optimize.hpp"

using namespace wgpr;

TEST_CASE("concave quadratic converges to its maximizer") {
  Eigen::VectorXd target(3);
  target << 1.0, -2.0, 0.5;
  optimize::Objective obj = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = -2.0 * (x - target);
    return -(x - target).squaredNorm();
  };
  optimize::FitConfig cfg;
  cfg.max_iterations = 100;
  cfg.relative_tolerance = 1e-12;
  auto res = optimize::maximize(obj, Eigen::VectorXd::Zero(3), cfg);
  CHECK((res.parameters - target).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(res.value > -1e-14);
  CHECK(res.converged);
  CHECK(res.iterations < 60);
}

TEST_CASE("negated rosenbrock from the standard start") {
  optimize::Objective obj = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    grad.resize(2);
    grad[0] = 2.0 * a + 400.0 * x[0] * b;
    grad[1] = -200.0 * b;
    return -(a * a + 100.0 * b * b);
  };
  Eigen::VectorXd start(2);
  start << -1.2, 1.0;
  optimize::FitConfig cfg;
  cfg.max_iterations = 2000;
  cfg.relative_tolerance = 1e-14;
  auto res = optimize::maximize(obj, start, cfg);
  CHECK(res.value > -1e-6);
  CHECK(res.parameters[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.parameters[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("trace is non-decreasing and never below the start") {
  // A wavy but smooth objective: f(x) = -sum x_i^2 cos(x_i).
  optimize::Objective obj = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    double v = 0.0;
    grad.resize(x.size());
    for (int i = 0; i < x.size(); ++i) {
      v -= x[i] * x[i] * std::cos(x[i]);
      grad[i] = -(2.0 * x[i] * std::cos(x[i]) - x[i] * x[i] * std::sin(x[i]));
    }
    return v;
  };
  Eigen::VectorXd start(2);
  start << 0.4, -0.3;
  optimize::FitConfig cfg;
  Eigen::VectorXd g0(2);
  double v0 = obj(start, g0);
  auto res = optimize::maximize(obj, start, cfg);
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.front() == doctest::Approx(v0));
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] >= res.trace[i - 1] - 1e-15);
  CHECK(res.value >= v0);
}

TEST_CASE("non-finite start is rejected") {
  optimize::Objective obj = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = Eigen::VectorXd::Zero(x.size());
    return std::numeric_limits<double>::quiet_NaN();
  };
  optimize::FitConfig cfg;
  CHECK_THROWS_AS(optimize::maximize(obj, Eigen::VectorXd::Zero(2), cfg),
                  InvalidInputError);
}

TEST_CASE("line search backs away from a non-finite region") {
  // Objective is NaN outside the box |x_i| <= 3; the optimum at the origin is
  // reachable from a start near the boundary only if bad trial points are
  // treated as rejected steps.
  optimize::Objective obj = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = -2.0 * x;
    if (x.cwiseAbs().maxCoeff() > 3.0) return std::numeric_limits<double>::quiet_NaN();
    return -x.squaredNorm();
  };
  Eigen::VectorXd start(2);
  start << 2.9, -2.9;
  optimize::FitConfig cfg;
  cfg.max_iterations = 200;
  auto res = optimize::maximize(obj, start, cfg);
  CHECK(res.parameters.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("repeated runs are identical") {
  optimize::Objective obj = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = -4.0 * x.array().pow(3).matrix();
    return -x.array().pow(4).sum();
  };
  Eigen::VectorXd start(3);
  start << 1.0, -0.5, 0.25;
  optimize::FitConfig cfg;
  auto a = optimize::maximize(obj, start, cfg);
  auto b = optimize::maximize(obj, start, cfg);
  CHECK(a.value == b.value);
  CHECK(a.iterations == b.iterations);
  CHECK((a.parameters - b.parameters).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.trace.size() == b.trace.size());
}

TEST_CASE("config validation") {
  optimize::FitConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
  cfg = optimize::FitConfig{};
  cfg.max_iterations = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
  cfg = optimize::FitConfig{};
  cfg.relative_tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInputError);
}
