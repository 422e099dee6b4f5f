#include "dppss/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dppss/density.hpp"
#include "dppss/estimators.hpp"
#include "dppss/experiments.hpp"
#include "dppss/oracle.hpp"

namespace dppss {

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

void print_report(std::ostream& out, const ValidationReport& report) {
  out << "suite,check,status,value,threshold\n";
  for (const auto& c : report.checks)
    out << c.suite << ',' << c.name << ',' << (c.passed ? "PASS" : "FAIL") << ','
        << format_number(c.value) << ',' << format_number(c.threshold) << '\n';
}

double partition_of_unity_deviation(const ScalingFunction& sf, int scale, bool periodized, int points) {
  if (points < 1) throw std::invalid_argument("partition_of_unity_deviation: need points >= 1");
  const double size = std::ldexp(1.0, scale);
  const double norm = 1.0 / std::sqrt(size);
  double worst = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double x = static_cast<double>(i) / (points + 1);
    int lo = 0, hi = static_cast<int>(size) - 1;
    if (!periodized) {
      lo = static_cast<int>(std::ceil(size * x - sf.support_end()));
      hi = static_cast<int>(std::floor(size * x - sf.support_begin()));
    }
    double acc = 0.0;
    for (int k = lo; k <= hi; ++k) acc += norm * eval_dilated(sf, scale, k, x, periodized);
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  return worst;
}

std::vector<Eigen::Index> validation_draw(const DiscreteDPP& dpp, Rng& rng, bool biased) {
  if (biased && uniform01(rng) < 0.3) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(dpp.size()));
    std::iota(order.begin(), order.end(), 0);
    const auto& p = dpp.inclusion_probabilities();
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return p[a] > p[b]; });
    order.resize(static_cast<std::size_t>(dpp.rank()));
    std::sort(order.begin(), order.end());
    return order;
  }
  return sample_discrete(dpp, rng);
}

namespace {

Eigen::MatrixXd uniform_points(Eigen::Index n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd out(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) out(i, c) = uniform01(rng);
  return out;
}

ProjectionKernel haar1(int scale) {
  return wavelet_kernel(ScalingFunction::haar(), scale, 1, WaveletMode::interior);
}

void add(ValidationReport& r, const char* suite, const char* name, bool ok, double value, double threshold) {
  r.checks.push_back({suite, name, ok, value, threshold});
}

void oracle_suite(ValidationReport& r, const ValidationOptions& o) {
  const Eigen::MatrixXd pts = uniform_points(6, 1, trial_seed(o.seed, 1));
  const DiscreteDPP dpp = build_discrete_dpp(build_feature_matrix(haar1(1), pts), Eigen::VectorXd::Ones(6));
  const auto exact = enumerate_subset_probabilities(dpp);
  add(r, "oracle", "enumeration_sums_to_one", std::abs(exact.total() - 1.0) < 1e-9,
      std::abs(exact.total() - 1.0), 1e-9);

  SubsetProbabilityTable empirical;
  empirical.subsets = exact.subsets;
  std::vector<double> counts(exact.subsets.size(), 0.0);
  Rng rng(trial_seed(o.seed, 2));
  constexpr int kDraws = 100000;
  for (int t = 0; t < kDraws; ++t) {
    const auto s = validation_draw(dpp, rng, o.inject_bias);
    const auto it = std::find(exact.subsets.begin(), exact.subsets.end(), s);
    if (it == exact.subsets.end()) throw std::runtime_error("oracle suite: draw outside the enumeration");
    counts[static_cast<std::size_t>(it - exact.subsets.begin())] += 1.0 / kDraws;
  }
  empirical.probabilities = counts;
  const double tv = tv_distance(exact, empirical);
  add(r, "oracle", "tv_distance", tv < 0.01, tv, 0.01);
}

void partition_suite(ValidationReport& r, const ValidationOptions&) {
  const double haar = partition_of_unity_deviation(ScalingFunction::haar(), 3, false, 1001);
  add(r, "partition", "haar_j3", haar == 0.0, haar, 0.0);
  const double db2 = partition_of_unity_deviation(ScalingFunction::daubechies2(), 4, true, 1001);
  add(r, "partition", "db2_periodized_j4", db2 < 1e-4, db2, 1e-4);
}

void unbiasedness_suite(ValidationReport& r, const ValidationOptions& o) {
  constexpr int kDraws = 4000;
  const Eigen::MatrixXd pts = uniform_points(300, 1, trial_seed(o.seed, 3));
  const Eigen::VectorXd f = pts.col(0).array().square();
  const double total = f.sum();

  const DiscreteDPP dpp = build_discrete_dpp(build_feature_matrix(haar1(2), pts), Eigen::VectorXd::Ones(300));
  std::vector<double> dpp_est(kDraws);
  Rng rng(trial_seed(o.seed, 4));
  for (auto& v : dpp_est) v = coreset_estimate(validation_draw(dpp, rng, o.inject_bias), dpp, f);
  double mean = std::accumulate(dpp_est.begin(), dpp_est.end(), 0.0) / kDraws;
  double z = std::abs(mean - total) / std::sqrt(sample_variance(dpp_est) / kDraws);
  add(r, "unbiasedness", "haar_coreset_zscore", z < 4.0, z, 4.0);

  const SubsetSampler iid(SamplerKind::iid, pts, 4, KdeShape::epanechnikov);
  std::vector<double> iid_est(kDraws);
  for (auto& v : iid_est) v = iid.estimate_totals(iid.draw(rng), f)[0];
  mean = std::accumulate(iid_est.begin(), iid_est.end(), 0.0) / kDraws;
  z = std::abs(mean - total) / std::sqrt(sample_variance(iid_est) / kDraws);
  add(r, "unbiasedness", "iid_coreset_zscore", z < 4.0, z, 4.0);

  TestFunctionParams params;
  params.gamma = 0.75;
  const TestFunction g = test_function_library("gamma", params);
  const ProjectionKernel k = haar1(3);
  std::vector<double> q(kDraws);
  for (auto& v : q) v = quadrature_draw(SamplerKind::haar, &k, 8, 1, g, unit_weight(), {}, rng);
  mean = std::accumulate(q.begin(), q.end(), 0.0) / kDraws;
  z = std::abs(mean - quadrature_truth(g, unit_weight(), 1)) / std::sqrt(sample_variance(q) / kDraws);
  add(r, "unbiasedness", "haar_quadrature_zscore", z < 4.0, z, 4.0);
}

void transfer_suite(ValidationReport& r, const ValidationOptions& o) {
  constexpr int kDatasets = 5;
  const ProjectionKernel kernel = haar1(2);
  const double vc = continuous_variance_exact(kernel, [](std::span<const double> x) { return x[0]; });
  TransferBoundInputs in;
  in.n = 4;
  in.big_n = 1e4;
  in.k_max = 4;
  int exact_ok = 0, kde_ok = 0;
  for (int s = 0; s < kDatasets; ++s) {
    const Eigen::MatrixXd pts = uniform_points(10000, 1, trial_seed(o.seed, 100 + s));
    const Eigen::MatrixXd psi = build_feature_matrix(kernel, pts);
    const Eigen::VectorXd f = pts.col(0);
    const DiscreteDPP exact = build_discrete_dpp(psi, Eigen::VectorXd::Ones(pts.rows()));
    if (transfer_interval_exact(vc, 1.0, in, 0.45, 2.05).contains(discrete_variance_exact(exact, f))) ++exact_ok;
    const Eigen::VectorXd rho = DensityEstimate(pts, KdeShape::epanechnikov).at_data();
    TransferBoundInputs kde_in = in;
    kde_in.epsilon = relative_error_diagnostic(Eigen::VectorXd::Ones(pts.rows()), rho);
    const DiscreteDPP kde = build_discrete_dpp(psi, rho);
    if (transfer_interval_estimated(vc, 1.0, kde_in).contains(discrete_variance_exact(kde, f))) ++kde_ok;
  }
  add(r, "transfer", "exact_density_inside", exact_ok >= kDatasets - 1, exact_ok, kDatasets - 1);
  add(r, "transfer", "kde_density_inside", kde_ok >= kDatasets - 1, kde_ok, kDatasets - 1);
}

void slope_suite(ValidationReport& r, const ValidationOptions& o) {
  QuadratureConfig cfg;
  cfg.fn = "gamma";
  cfg.fn_params.gamma = 0.75;
  cfg.n_list = {4, 8, 16, 32, 64};
  cfg.trials = 200;
  cfg.seed = trial_seed(o.seed, 5);
  cfg.threads = o.threads;
  cfg.sampler = SamplerKind::iid;
  const double iid = run_quadrature_experiment(cfg).front().slope;
  add(r, "slope", "iid_gamma0.75_d1", std::abs(iid + 1.0) <= 0.2, iid, -1.0);
  cfg.sampler = SamplerKind::haar;
  const double haar = run_quadrature_experiment(cfg).front().slope;
  add(r, "slope", "haar_gamma0.75_d1_at_most", haar <= -2.5 + 0.3, haar, -2.2);
}

}  // namespace

ValidationReport run_validation(std::string_view selector, const ValidationOptions& options) {
  const bool all = selector == "all";
  bool known = all;
  ValidationReport report;
  auto run = [&](std::string_view name, void (*suite)(ValidationReport&, const ValidationOptions&)) {
    if (!all && selector != name) return;
    known = true;
    suite(report, options);
  };
  run("oracle", oracle_suite);
  run("partition", partition_suite);
  run("unbiasedness", unbiasedness_suite);
  run("transfer", transfer_suite);
  run("slope", slope_suite);
  if (!known) throw std::invalid_argument("run_validation: unknown suite '" + std::string(selector) + "'");
  return report;
}

}  // namespace dppss
