#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dppss/discretize.hpp"
#include "dppss/oracle.hpp"

using namespace dppss;

namespace {

Eigen::MatrixXd uniform(Eigen::Index n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) x(i, c) = uniform01(rng);
  return x;
}

}  // namespace

TEST_CASE("feature matrix rows are the features") {
  const auto k = ope_kernel(2, 4);
  const Eigen::MatrixXd x = uniform(5, 2, 1);
  const Eigen::MatrixXd psi = build_feature_matrix(k, x);
  const double row[2] = {x(2, 0), x(2, 1)};
  CHECK((psi.row(2).transpose() - k.features(row)).norm() < 1e-14);
  Eigen::MatrixXd bad = x;
  bad(0, 0) = 1.5;
  CHECK_THROWS(build_feature_matrix(k, bad));
}

TEST_CASE("pipeline yields a projection of rank n") {
  const auto k = wavelet_kernel(ScalingFunction::daubechies2(), 2, 1, WaveletMode::periodized);
  const Eigen::MatrixXd x = uniform(300, 1, 2);
  const DiscreteDPP dpp = build_discrete_dpp(build_feature_matrix(k, x), Eigen::VectorXd::Ones(300));
  REQUIRE(dpp.rank() == 4);
  const Eigen::MatrixXd& u = dpp.basis();
  CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(dpp.inclusion_probabilities().sum() == doctest::Approx(4.0));
  CHECK((dpp.inclusion_probabilities().array() <= 1.0 + 1e-12).all());
  const Eigen::MatrixXd block = dpp.kernel_block(0, 300);
  CHECK((block * block - block).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((block - block.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(dpp.kernel_block(10, 3).row(1).isApprox(block.row(11)));
  CHECK_THROWS_AS(dpp.inclusion_probability(300), std::out_of_range);
}

TEST_CASE("rank drops when the data miss a feature") {
  // Haar j=2 with no point in [0.5, 0.75): one feature vanishes on the data.
  Eigen::MatrixXd x(6, 1);
  x << 0.1, 0.2, 0.3, 0.4, 0.8, 0.9;
  const auto k = wavelet_kernel(ScalingFunction::haar(), 2, 1, WaveletMode::interior);
  const DiscreteDPP dpp = build_discrete_dpp(build_feature_matrix(k, x), Eigen::VectorXd::Ones(6));
  CHECK(dpp.rank() == 3);
}

TEST_CASE("pipeline input errors") {
  const Eigen::MatrixXd psi = Eigen::MatrixXd::Ones(3, 1);
  CHECK_THROWS_AS(build_discrete_dpp(psi, Eigen::VectorXd::Ones(2)), std::invalid_argument);
  Eigen::VectorXd rho = Eigen::VectorXd::Ones(3);
  rho[1] = 0.0;
  CHECK_THROWS_AS(build_discrete_dpp(psi, rho), std::domain_error);
  CHECK_THROWS(build_discrete_dpp(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(3)));
}

TEST_CASE("signs are canonical and the build is deterministic") {
  const auto k = ope_kernel(1, 3);
  const Eigen::MatrixXd psi = build_feature_matrix(k, uniform(40, 1, 4));
  const auto a = build_discrete_dpp(psi, Eigen::VectorXd::Ones(40));
  const auto b = build_discrete_dpp(psi, Eigen::VectorXd::Ones(40));
  CHECK((a.basis() - b.basis()).norm() == 0.0);
  for (Eigen::Index c = 0; c < a.rank(); ++c) {
    Eigen::Index arg;
    a.basis().col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(a.basis()(arg, c) > 0.0);
  }
}

TEST_CASE("float pipeline agrees with double") {
  const auto k = ope_kernel(1, 3);
  const Eigen::MatrixXd psi = build_feature_matrix(k, uniform(50, 1, 6));
  const auto d = build_discrete_dpp(psi, Eigen::VectorXd::Ones(50));
  const auto f = build_discrete_dpp(Eigen::MatrixXf(psi.cast<float>()), Eigen::VectorXf::Ones(50), 1e-6f);
  CHECK((d.inclusion_probabilities().cast<float>() - f.inclusion_probabilities()).cwiseAbs().maxCoeff() < 1e-4f);
}

TEST_CASE("exact sampler draws distinct sorted indices") {
  const auto k = ope_kernel(2, 5);
  const auto dpp = build_discrete_dpp(build_feature_matrix(k, uniform(80, 2, 8)), Eigen::VectorXd::Ones(80));
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto s = sample_discrete(dpp, rng);
    CHECK(s.size() == 5);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  }
}

TEST_CASE("empirical inclusion frequencies match the diagonal") {
  const auto k = ope_kernel(1, 2);
  const auto dpp = build_discrete_dpp(build_feature_matrix(k, uniform(10, 1, 9)), Eigen::VectorXd::Ones(10));
  Rng rng(2);
  constexpr int kTrials = 20000;
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(10);
  for (int t = 0; t < kTrials; ++t)
    for (auto i : sample_discrete(dpp, rng)) counts[i] += 1.0 / kTrials;
  for (Eigen::Index i = 0; i < 10; ++i) {
    const double p = dpp.inclusion_probability(i);
    CHECK(std::abs(counts[i] - p) < 4.5 * std::sqrt(p * (1 - p) / kTrials) + 1e-12);
  }
}

TEST_CASE("error functional") {
  TransferBoundInputs in;
  in.n = 4;
  in.big_n = 1e4;
  in.delta = 0.1;
  in.delta_prime = 0.1;
  // independent evaluation of each term
  const double a = 4.0 * std::sqrt(2.0 * std::log(2.0 / 0.1) / 1e4);
  const double l = std::log(17.0 / 0.1);
  const double expected = a + 4.0 / (9.0 * 1e8) * l * l + 4.0 / 1e4 * l;
  const auto e = error_functional(in);
  CHECK(e.error == doctest::Approx(expected).epsilon(1e-12));
  CHECK(e.error == doctest::Approx(0.09997).epsilon(1e-3));
  CHECK(e.tilde_error == doctest::Approx(a + 8.0 / (9.0 * 1e8) * l * l + 8.0 / 1e4 * l).epsilon(1e-12));
  double previous = 1e300;
  for (double n : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    in.big_n = n;
    const double v = error_functional(in).error;
    CHECK(v < previous);
    previous = v;
  }
  in.big_n = 0;
  CHECK_THROWS(error_functional(in));
}

TEST_CASE("transfer intervals") {
  TransferBoundInputs in;
  in.n = 4;
  in.big_n = 1e4;
  in.k_max = 4;
  const double err = 4.0 * 16.0 * error_functional(in).error;
  const auto iv = transfer_interval_exact(1.0, 1.0, in, 0.45, 2.05);
  CHECK(iv.lower == doctest::Approx(0.45 - err));
  CHECK(iv.upper == doctest::Approx(2.05 + err));
  CHECK(iv.contains(1.0));
  in.epsilon = 0.1;
  const auto wide = transfer_interval_estimated(1.0, 1.0, in);
  CHECK(wide.upper == doctest::Approx(2.0 * 1.21 + 32.0 * 16.0 * error_functional(in).error + 8.0 * 0.01 * 4));
  CHECK(wide.lower == doctest::Approx((1e4 - 1) / 2e4 * 0.81 - 16.0 * 16.0 * error_functional(in).error - 4.0 * 0.01 * 4));
}
