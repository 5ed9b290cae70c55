#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "wgpr/errors.hpp"
#include "wgpr/warp.hpp"

using namespace wgpr;

namespace {

warp::WarpParams single_step(double a, double b, double c, bool identity = true) {
  warp::WarpParams p;
  p.step_sizes = Eigen::VectorXd::Constant(1, a);
  p.steepnesses = Eigen::VectorXd::Constant(1, b);
  p.positions = Eigen::VectorXd::Constant(1, c);
  p.include_identity = identity;
  return p;
}

}  // namespace

TEST_CASE("identity parameters reduce the warp to the identity map") {
  auto p = warp::WarpParams::identity(3);
  for (double y : {-4.0, -0.5, 0.0, 1.3, 7.0}) {
    CHECK(warp::forward(p, y) == y);
    CHECK(warp::derivative(p, y) == 1.0);
    CHECK(warp::inverse(p, y) == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("single step reference values") {
  auto p = single_step(1.0, 1.0, 0.0);
  CHECK(warp::forward(p, 1.0) ==
        doctest::Approx(1.0 + std::tanh(1.0)).epsilon(1e-15));  // 1.761594...
  CHECK(warp::inverse(p, 1.0 + std::tanh(1.0)) == doctest::Approx(1.0).epsilon(1e-9));

  // g'(y) = 1 + a b sech^2(b y + c); at y = 0 with a = 1, b = 2: 1 + 2 = 3.
  auto steep = single_step(1.0, 2.0, 0.0);
  CHECK(warp::derivative(steep, 0.0) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("forward is strictly increasing with the identity term") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = testutil::random_warp_params(rng, 3);
    double prev = warp::forward(p, -5.0);
    for (double y = -4.8; y <= 5.0; y += 0.2) {
      double cur = warp::forward(p, y);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("derivative matches finite differences on a grid") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = testutil::random_warp_params(rng, 4);
    for (double y = -3.0; y <= 3.0; y += 0.25) {
      const double h = 1e-6;
      double fd = (warp::forward(p, y + h) - warp::forward(p, y - h)) / (2.0 * h);
      CHECK(testutil::rel_err(warp::derivative(p, y), fd) < 1e-6);
    }
  }
}

TEST_CASE("inverse round trips to 1e-8 for random parameters") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = testutil::random_warp_params(rng, 5);
    for (double y : {-5.0, -1.7, -0.2, 0.0, 0.9, 2.4, 5.0}) {
      double back = warp::inverse(p, warp::forward(p, y));
      CHECK(std::abs(back - y) < 1e-8);
    }
  }
}

TEST_CASE("bounded warp without the identity term") {
  auto p = single_step(1.0, 1.0, 0.0, /*identity=*/false);
  // Range is (-1, 1); interior values invert, the boundary and beyond do not.
  double y = warp::inverse(p, 0.5);
  CHECK(warp::forward(p, y) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(y == doctest::Approx(std::atanh(0.5)).epsilon(1e-8));
  CHECK_THROWS_AS(warp::inverse(p, 1.0), RangeErrorW);
  CHECK_THROWS_AS(warp::inverse(p, -1.5), RangeErrorW);
}

TEST_CASE("parameter jacobian matches finite differences") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    const int steps = 3;
    auto p = testutil::random_warp_params(rng, steps);
    std::uniform_real_distribution<double> ydist(-2.0, 2.0);
    double y = ydist(rng);
    auto jac = warp::param_jacobian(p, y);
    REQUIRE(jac.d_forward.size() == 3 * steps);
    REQUIRE(jac.d_derivative.size() == 3 * steps);

    const double h = 1e-6;
    auto perturbed = [&](int slot, int l, double delta) {
      auto q = p;
      if (slot == 0) q.step_sizes[l] += delta;
      if (slot == 1) q.steepnesses[l] += delta;
      if (slot == 2) q.positions[l] += delta;
      return q;
    };
    for (int slot = 0; slot < 3; ++slot) {
      for (int l = 0; l < steps; ++l) {
        int idx = slot * steps + l;
        double fd_fwd = (warp::forward(perturbed(slot, l, h), y) -
                         warp::forward(perturbed(slot, l, -h), y)) /
                        (2.0 * h);
        double fd_der = (warp::derivative(perturbed(slot, l, h), y) -
                         warp::derivative(perturbed(slot, l, -h), y)) /
                        (2.0 * h);
        CHECK(testutil::rel_err(jac.d_forward[idx], fd_fwd) < 1e-5);
        CHECK(testutil::rel_err(jac.d_derivative[idx], fd_der) < 1e-5);
      }
    }
  }
}

TEST_CASE("parameter validation") {
  auto p = single_step(-0.1, 1.0, 0.0);
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
  p = single_step(1.0, -1.0, 0.0);
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
  p = single_step(1.0, 1.0, 0.0);
  p.positions = Eigen::VectorXd::Zero(2);  // size mismatch
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
}

TEST_CASE("near identity initialization") {
  auto p = warp::WarpParams::near_identity_init(4, -1.0, 1.0);
  p.validate();
  CHECK(p.steps() == 4);
  for (int l = 0; l < 4; ++l) {
    CHECK(p.step_sizes[l] == doctest::Approx(0.01));
    CHECK(p.steepnesses[l] == doctest::Approx(1.0));
  }
  // Centers spread across the range: distinct and ordered.
  for (int l = 1; l < 4; ++l) CHECK(p.positions[l] < p.positions[l - 1] + 2.0);
  // Near the identity in value.
  for (double y = -1.0; y <= 1.0; y += 0.1)
    CHECK(std::abs(warp::forward(p, y) - y) < 0.05);
}

TEST_CASE("curve csv output") {
  auto p = single_step(0.5, 1.0, 0.0);
  std::ostringstream out;
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  warp::write_curve_csv(out, p, grid);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "y,warped");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    double y = 0.0, z = 0.0;
    char comma = 0;
    std::istringstream row(line);
    row >> y >> comma >> z;
    CHECK(z == doctest::Approx(warp::forward(p, y)).epsilon(1e-12));
  }
  CHECK(rows == 5);
}
