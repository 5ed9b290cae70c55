#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "wgpr/errors.hpp"
#include "wgpr/kernel.hpp"
#include "wgpr/linalg.hpp"

using namespace wgpr;

namespace {

kernel::KernelParams unit_params(int dims, double noise = 0.0) {
  kernel::KernelParams p;
  p.signal_variance = 1.0;
  p.lengthscales = Eigen::VectorXd::Ones(dims);
  p.noise_variance = noise;
  return p;
}

}  // namespace

TEST_CASE("kernel at zero distance returns the signal variance") {
  auto p = unit_params(3);
  p.signal_variance = 2.0;
  Eigen::VectorXd x(3);
  x << 0.4, -1.2, 5.0;
  CHECK(kernel::eval(p, x, x) == 2.0);
}

TEST_CASE("kernel reference value at unit scaled distance") {
  auto p = unit_params(1);
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << std::sqrt(2.0);
  // Squared distance 2, lengthscale 1: k = exp(-1) = 0.36787944...
  CHECK(kernel::eval(p, a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("kernel grows with lengthscale and is symmetric") {
  Eigen::VectorXd a(2), b(2);
  a << 0.0, 0.0;
  b << 1.0, -2.0;
  double prev = 0.0;
  for (double ell : {0.3, 0.6, 1.2, 2.4, 10.0}) {
    auto p = unit_params(2);
    p.lengthscales[0] = ell;
    double k = kernel::eval(p, a, b);
    CHECK(k > prev);
    CHECK(kernel::eval(p, b, a) == k);
    prev = k;
  }
  CHECK(prev < 1.0);
}

TEST_CASE("kernel input validation") {
  auto p = unit_params(2);
  Eigen::VectorXd a(2), b(3);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(kernel::eval(p, a, b), InvalidInputError);

  auto bad = unit_params(1);
  bad.signal_variance = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = unit_params(1);
  bad.lengthscales[0] = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = unit_params(1);
  bad.noise_variance = -1e-3;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("log vector packing round trips") {
  std::mt19937_64 rng(21);
  auto p = testutil::random_kernel_params(rng, 4);
  auto back = kernel::KernelParams::from_log_vector(p.to_log_vector());
  CHECK(back.signal_variance == doctest::Approx(p.signal_variance).epsilon(1e-14));
  CHECK(back.noise_variance == doctest::Approx(p.noise_variance).epsilon(1e-14));
  for (int d = 0; d < 4; ++d)
    CHECK(back.lengthscales[d] == doctest::Approx(p.lengthscales[d]).epsilon(1e-14));
}

TEST_CASE("gram matches a brute force double loop bit for bit") {
  std::mt19937_64 rng(22);
  auto p = testutil::random_kernel_params(rng, 3);
  Eigen::MatrixXd x = testutil::random_matrix(rng, 10, 3, -2.0, 2.0);

  Eigen::MatrixXd got = kernel::gram_raw(p, x, /*add_noise=*/true);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      double expected = kernel::eval(p, x.row(i).transpose(), x.row(j).transpose());
      if (i == j) expected += p.noise_variance;
      CHECK(got(i, j) == expected);
    }
  }
}

TEST_CASE("gram of a single point") {
  auto p = unit_params(1, 0.25);
  p.signal_variance = 2.0;
  Eigen::MatrixXd x(1, 1);
  x << 3.0;
  auto g = kernel::gram(p, x, true);
  CHECK(g.entries.rows() == 1);
  CHECK(g.entries(0, 0) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(g.jitter_applied == 0.0);
}

TEST_CASE("duplicated rows without noise trigger jitter") {
  auto p = unit_params(1, 0.0);
  Eigen::MatrixXd x(4, 1);
  x << 0.5, 0.5, 0.5, 0.5;
  auto g = kernel::gram(p, x, true);
  CHECK(g.jitter_applied > 0.0);
  // The jittered matrix must now admit a clean factorization.
  CHECK_NOTHROW(linalg::jittered_cholesky(g.entries));
}

TEST_CASE("gram gradients match finite differences of the raw gram") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 8, dims = 2;
    auto p = testutil::random_kernel_params(rng, dims);
    Eigen::MatrixXd x = testutil::random_matrix(rng, n, dims, -1.5, 1.5);
    auto grads = kernel::gram_gradients(p, x);
    REQUIRE(static_cast<int>(grads.size()) == dims + 2);

    Eigen::VectorXd theta = p.to_log_vector();
    const double h = 1e-6;
    for (int k = 0; k < theta.size(); ++k) {
      Eigen::VectorXd hi = theta, lo = theta;
      hi[k] += h;
      lo[k] -= h;
      Eigen::MatrixXd fd =
          (kernel::gram_raw(kernel::KernelParams::from_log_vector(hi), x, true) -
           kernel::gram_raw(kernel::KernelParams::from_log_vector(lo), x, true)) /
          (2.0 * h);
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          worst = std::max(worst, testutil::rel_err(grads[k](i, j), fd(i, j)));
      CHECK(worst < 1e-5);
    }
  }
}

TEST_CASE("signal variance gradient equals the noiseless gram") {
  std::mt19937_64 rng(24);
  auto p = testutil::random_kernel_params(rng, 2);
  Eigen::MatrixXd x = testutil::random_matrix(rng, 6, 2);
  auto grads = kernel::gram_gradients(p, x);
  Eigen::MatrixXd noiseless = kernel::gram_raw(p, x, false);
  CHECK((grads[0] - noiseless).cwiseAbs().maxCoeff() < 1e-14);
  // Lengthscale gradients vanish on the diagonal (zero distance).
  for (int d = 1; d <= 2; ++d)
    CHECK(grads[d].diagonal().cwiseAbs().maxCoeff() == 0.0);
  // Noise gradient is sigma_n^2 I.
  Eigen::MatrixXd expected = p.noise_variance * Eigen::MatrixXd::Identity(6, 6);
  CHECK((grads[3] - expected).cwiseAbs().maxCoeff() < 1e-14);
}
