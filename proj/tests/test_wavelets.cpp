#include <doctest.h>

#include <cmath>

#include "dppss/quadrature.hpp"
#include "dppss/validation.hpp"
#include "dppss/wavelets.hpp"

using namespace dppss;

TEST_CASE("haar is the half-open indicator") {
  CHECK(haar_eval(0.0) == 1.0);
  CHECK(haar_eval(0.999999) == 1.0);
  CHECK(haar_eval(1.0) == 0.0);
  CHECK(haar_eval(-1e-12) == 0.0);
}

TEST_CASE("db2 filter identities") {
  const auto h = daubechies2_filter();
  CHECK(std::abs(h[0] + h[1] + h[2] + h[3] - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(h[0] * h[0] + h[1] * h[1] + h[2] * h[2] + h[3] * h[3] - 1.0) < 1e-12);
  CHECK(std::abs(h[0] * h[2] + h[1] * h[3]) < 1e-12);
}

TEST_CASE("db2 cascade invariants") {
  const auto& sf = ScalingFunction::daubechies2();
  CHECK(sf.support_begin() == 0.0);
  CHECK(sf.support_end() == 3.0);
  auto integral = [&](auto g) { return integrate_adaptive(g, 0.0, 4.0, 1e-10, {1.0, 2.0, 3.0}); };
  CHECK(std::abs(integral([&](double x) { return sf(x); }) - 1.0) < 1e-6);
  CHECK(std::abs(integral([&](double x) { return sf(x) * sf(x); }) - 1.0) < 1e-4);
  for (int k = 1; k <= 2; ++k)
    CHECK(std::abs(integral([&](double x) { return sf(x) * sf(x - k); })) < 1e-4);
  CHECK(sf(-0.1) == 0.0);
  CHECK(sf(3.1) == 0.0);
  // phi(1) = (1 + sqrt 3) / 2 for db2
  CHECK(std::abs(sf(1.0) - (1.0 + std::sqrt(3.0)) / 2.0) < 1e-6);
}

TEST_CASE("cascade rejects a coarse table") {
  CHECK_THROWS_AS(daubechies2_cascade(3), std::invalid_argument);
}

TEST_CASE("partition of unity") {
  CHECK(partition_of_unity_deviation(ScalingFunction::haar(), 0, false, 999) == 0.0);
  CHECK(partition_of_unity_deviation(ScalingFunction::haar(), 5, true, 999) == 0.0);
  const auto& db2 = ScalingFunction::daubechies2();
  CHECK(partition_of_unity_deviation(db2, 4, true, 1001) < 1e-4);
  CHECK(partition_of_unity_deviation(db2, 2, false, 1001) < 1e-4);
}

TEST_CASE("dilation and periodization") {
  const auto& db2 = ScalingFunction::daubechies2();
  const double x = 0.3;
  CHECK(eval_dilated(db2, 2, 1, x, false) == doctest::Approx(2.0 * db2(4 * x - 1)));
  // periodized copy sums every wrap: phi(4x - 3) + phi(4x + 1)
  CHECK(eval_dilated(db2, 2, 3, x, true) == doctest::Approx(2.0 * (db2(4 * x - 3) + db2(4 * x + 1))));
  // periodized functions are 1-periodic
  CHECK(eval_dilated(db2, 1, 0, 0.2, true) == doctest::Approx(eval_dilated(db2, 1, 0, 1.2, true)));
}

TEST_CASE("tensor wavelets") {
  const auto haar = ScalingFunction::haar();
  TensorWavelet w{1, {0, 1}, false};
  const double inside[2] = {0.2, 0.7};
  const double outside[2] = {0.7, 0.7};
  CHECK(eval_tensor(w, haar, inside) == doctest::Approx(2.0));
  CHECK(eval_tensor(w, haar, outside) == 0.0);
  const double one[1] = {0.2};
  CHECK_THROWS_AS(eval_tensor(w, haar, one), std::invalid_argument);
}
