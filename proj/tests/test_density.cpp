#include <doctest.h>

#include <cmath>

#include "dppss/density.hpp"
#include "dppss/quadrature.hpp"
#include "dppss/random.hpp"

using namespace dppss;

TEST_CASE("scott bandwidth") {
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 1.0, 2.0, 3.0;
  const double sigma = std::sqrt(5.0 / 3.0);
  CHECK(scott_bandwidth(x)[0] == doctest::Approx(sigma * std::pow(4.0, -0.2)));
  CHECK_THROWS_AS(scott_bandwidth(Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
  CHECK_THROWS(scott_bandwidth(Eigen::MatrixXd::Ones(5, 1)));
}

TEST_CASE("kde integrates to one") {
  Rng rng(1);
  Eigen::MatrixXd x(200, 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = standard_normal(rng);
  for (KdeShape shape : {KdeShape::epanechnikov, KdeShape::gaussian}) {
    const DensityEstimate est(x, shape);
    const double mass = integrate_adaptive(
        [&](double t) { return est(std::span<const double>(&t, 1)); }, -12.0, 12.0, 1e-9);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("kernel profiles") {
  CHECK(kde_kernel(KdeShape::epanechnikov, 0.0) == doctest::Approx(0.75));
  CHECK(kde_kernel(KdeShape::epanechnikov, 1.0) == 0.0);
  CHECK(kde_kernel(KdeShape::gaussian, 0.0) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)));
}

TEST_CASE("single point estimate") {
  Eigen::MatrixXd x(1, 2);
  x << 0.5, 0.5;
  Eigen::VectorXd h(2);
  h << 0.1, 0.2;
  const DensityEstimate est(x, KdeShape::epanechnikov, h);
  const double at[2] = {0.5, 0.5};
  CHECK(kde_eval(est, at) == doctest::Approx(0.75 * 0.75 / (0.1 * 0.2)));
}

TEST_CASE("relative error diagnostic") {
  Eigen::VectorXd truth(3), est(3);
  truth << 1.0, 2.0, 4.0;
  est << 1.0, 1.0, 5.0;
  CHECK(relative_error_diagnostic(truth, est) == doctest::Approx(1.0));
  est[1] = 0.0;
  CHECK_THROWS_AS(relative_error_diagnostic(truth, est), std::domain_error);
}
