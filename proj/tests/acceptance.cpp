// Acceptance checks: one PASS/FAIL line per criterion, notes indented below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dppss/continuous_sampler.hpp"
#include "dppss/datasets.hpp"
#include "dppss/experiments.hpp"
#include "dppss/oracle.hpp"
#include "dppss/validation.hpp"

using namespace dppss;

namespace {

// Tolerances and budgets.
constexpr double kTvLimit = 0.01;
constexpr double kEnumerationMass = 1e-9;
constexpr double kKsLevel = 0.01;
constexpr double kDb2PartitionTol = 1e-4;
constexpr double kUnbiasedSe = 3.0;
constexpr double kSlopeTol = 0.3;
constexpr double kIidSlopeTol = 0.2;
constexpr double kAdjustedSlopeTol = 0.35;
constexpr double kSignTestLevel = 0.05;
constexpr double kReferenceGradTol = 0.02;
constexpr double kErrorFunctionalTol = 5e-4;
constexpr double kFilterTol = 1e-12;

int failures = 0;

void note(const std::string& text) { std::printf("    %s\n", text.c_str()); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void report(int id, bool ok, const std::string& what, double seconds) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, what.c_str(), seconds);
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Eigen::MatrixXd uniform_points(Eigen::Index n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) x(i, c) = uniform01(rng);
  return x;
}

// Asymptotic Kolmogorov tail with Stephens' small-sample correction.
double ks_pvalue(double d, double n) {
  const double t = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  double p = 0.0;
  for (int k = 1; k < 100; ++k) p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
  return std::clamp(p, 0.0, 1.0);
}

double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
  return d;
}

double binomial_upper_tail(int n, int k) {
  double p = 0.0;
  for (int i = k; i <= n; ++i) p += std::exp(std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) - n * std::log(2.0));
  return p;
}

void criterion1() {
  Timer t;
  const Eigen::MatrixXd x = uniform_points(6, 1, 101);
  const auto k = wavelet_kernel(ScalingFunction::haar(), 1, 1, WaveletMode::interior);
  const DiscreteDPP dpp = build_discrete_dpp(build_feature_matrix(k, x), Eigen::VectorXd::Ones(6));
  const auto exact = enumerate_subset_probabilities(dpp);
  Rng rng(102);
  const auto empirical = empirical_subset_frequencies(dpp, 100000, rng);
  const double tv = tv_distance(exact, empirical);
  const double mass = std::abs(exact.total() - 1.0);
  const double s = t.seconds();
  report(1, dpp.rank() == 2 && exact.subsets.size() == 15 && tv < kTvLimit && mass < kEnumerationMass && s < 10.0,
         "discrete sampler exactness, TV " + fmt("%.4f", tv) + ", |sum-1| " + fmt("%.1e", mass), s);
}

void criterion2() {
  Timer t;
  Rng rng(201);
  long violations = 0;
  std::vector<double> within;
  within.reserve(40000);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto s = sample_stratified_haar(2, 1, rng);
    std::vector<int> hits(4, 0);
    for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
      const double scaled = 4.0 * s.points(i, 0);
      const int cell = static_cast<int>(std::floor(scaled));
      if (cell < 0 || cell > 3) {
        ++violations;
        continue;
      }
      ++hits[cell];
      within.push_back(scaled - cell);
    }
    for (int h : hits) violations += h != 1;
  }
  const double d = ks_uniform(within);
  const double p = ks_pvalue(d, static_cast<double>(within.size()));
  report(2, violations == 0 && p > kKsLevel,
         "stratified equivalence, " + std::to_string(violations) + " violations, KS p " + fmt("%.3f", p), t.seconds());
}

void criterion3() {
  Timer t;
  const double haar = partition_of_unity_deviation(ScalingFunction::haar(), 4, false, 1001);
  const double db2 = partition_of_unity_deviation(ScalingFunction::daubechies2(), 4, true, 1001);
  report(3, haar == 0.0 && db2 < kDb2PartitionTol,
         "partition of unity, haar " + fmt("%.1e", haar) + ", db2 " + fmt("%.2e", db2), t.seconds());
}

void criterion4() {
  Timer t;
  TestFunctionParams params;
  params.gamma = 0.75;
  const TestFunction f = test_function_library("gamma", params);
  struct Case {
    SamplerKind kind;
    TestFunction weight;
    const char* label;
  };
  bool ok = true;
  std::string detail;
  for (const Case& c : {Case{SamplerKind::haar, unit_weight(), "haar"}, Case{SamplerKind::db2, bump_weight(), "db2"}}) {
    const ProjectionKernel k = sampler_kernel(c.kind, 16, 1);
    const Eigen::MatrixXd design = c.kind == SamplerKind::db2 ? design_points(k) : Eigen::MatrixXd();
    std::vector<double> draws(10000);
    for (std::size_t i = 0; i < draws.size(); ++i) {
      Rng rng(trial_seed(401 + static_cast<int>(c.kind), i));
      draws[i] = quadrature_draw(c.kind, &k, 16, 1, f, c.weight, design, rng);
    }
    const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
    const double se = std::sqrt(sample_variance(draws) / draws.size());
    const double z = std::abs(mean - quadrature_truth(f, c.weight, 1)) / se;
    ok = ok && z < kUnbiasedSe;
    detail += std::string(", ") + c.label + " z " + fmt("%.2f", z);
  }
  const double s = t.seconds();
  report(4, ok && s < 120.0, "quadrature unbiasedness" + detail, s);
}

// Exact-variance slope over the same n grid, for the notes.
double exact_slope(SamplerKind kind, const TestFunction& f, const TestFunction& w, int dim,
                   const std::vector<int>& ns, DesignRule rule = DesignRule::support_center) {
  std::vector<double> xs, vs;
  for (int n : ns) {
    const ProjectionKernel k = sampler_kernel(kind, n, dim);
    std::function<double(std::span<const double>)> g;
    if (kind == SamplerKind::db2) {
      // adjusted statistic = linear statistic of (f w - sum_k 2^{-j/2} Phi_k f w(x_k)) / K(x,x)
      const Eigen::MatrixXd design = design_points(k, rule);
      Eigen::VectorXd at(design.rows());
      for (Eigen::Index r = 0; r < design.rows(); ++r) {
        const Eigen::VectorXd p = design.row(r).transpose();
        at[r] = f(p) * w(p);
      }
      const double c = std::sqrt(std::ldexp(1.0, -dim * k.scale()));
      g = [&, at, c](std::span<const double> x) {
        const Eigen::VectorXd phi = k.features(x);
        return (f(x) * w(x) - c * phi.dot(at)) / phi.squaredNorm();
      };
    } else {
      g = [&](std::span<const double> x) { return f(x) * w(x) / k.diagonal(x); };
    }
    xs.push_back(n);
    vs.push_back(continuous_variance_exact(k, g));
  }
  return fit_loglog_slope(xs, vs);
}

void criterion5() {
  Timer t;
  auto mse_slope = [](const std::vector<QuadratureRow>& rows) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      xs.push_back(r.n);
      ys.push_back(r.mse);
    }
    return fit_loglog_slope(xs, ys);
  };
  QuadratureConfig cfg;
  cfg.fn = "gamma";
  cfg.trials = 400;
  cfg.n_list = {4, 8, 16, 32, 64, 128, 256};
  bool ok = true;
  std::string detail;
  for (double s : {0.25, 0.75}) {
    cfg.sampler = SamplerKind::haar;
    cfg.fn_params.gamma = s;
    cfg.seed = 500 + static_cast<int>(100 * s);
    const double slope = mse_slope(run_quadrature_experiment(cfg));
    const double target = -1.0 - 2.0 * s;
    const bool pass = std::abs(slope - target) <= kSlopeTol;
    ok = ok && pass;
    detail += ", haar d=1 s=" + fmt("%.2f", s) + " " + fmt("%.2f", slope) + " vs " + fmt("%.2f", target);
    if (!pass) {
      const double predicted = exact_slope(SamplerKind::haar, test_function_library("gamma", cfg.fn_params),
                                           unit_weight(), 1, cfg.n_list);
      note("d=1 s=" + fmt("%.2f", s) + ": exact-variance slope over the same n is " + fmt("%.2f", predicted) +
           "; the single kink of gamma decays faster than the worst-case Holder rate");
    }
  }
  cfg.sampler = SamplerKind::iid;
  cfg.fn_params.gamma = 0.75;
  cfg.seed = 590;
  const double iid = mse_slope(run_quadrature_experiment(cfg));
  ok = ok && std::abs(iid + 1.0) <= kIidSlopeTol;
  detail += ", iid " + fmt("%.2f", iid);

  cfg.sampler = SamplerKind::haar;
  cfg.dim = 2;
  cfg.n_list = {4, 16, 64, 256};
  cfg.seed = 595;
  const double d2 = mse_slope(run_quadrature_experiment(cfg));
  ok = ok && std::abs(d2 + 1.75) <= kSlopeTol;
  detail += ", haar d=2 " + fmt("%.2f", d2);
  const double s = t.seconds();
  report(5, ok && s < 600.0, "variance-decay slopes" + detail, s);
}

void criterion6() {
  Timer t;
  QuadratureConfig cfg;
  cfg.sampler = SamplerKind::db2;
  cfg.fn = "gamma";
  cfg.fn_params.gamma = 0.75;
  cfg.weight = "bump";
  cfg.trials = 400;
  cfg.n_list = {4, 8, 16, 32, 64, 128};
  cfg.seed = 601;
  const double slope = run_quadrature_experiment(cfg).front().slope;
  const double s = t.seconds();
  report(6, std::abs(slope + 2.5) <= kAdjustedSlopeTol && s < 600.0,
         "adjusted-estimator rate, db2 slope " + fmt("%.2f", slope) + " vs -2.50", s);
  const auto f = test_function_library("gamma", cfg.fn_params);
  note("exact-variance slope, support-centre design " +
       fmt("%.2f", exact_slope(SamplerKind::db2, f, bump_weight(), 1, cfg.n_list)) + ", barycenter design " +
       fmt("%.2f", exact_slope(SamplerKind::db2, f, bump_weight(), 1, cfg.n_list, DesignRule::barycenter)));
}

void criterion7() {
  Timer t;
  constexpr int kDatasets = 20;
  const auto k = wavelet_kernel(ScalingFunction::haar(), 2, 1, WaveletMode::interior);
  const double vc = continuous_variance_exact(k, [](std::span<const double> x) { return x[0]; });
  TransferBoundInputs in;
  in.n = 4;
  in.big_n = 1e4;
  in.delta = 0.05;
  in.delta_prime = 0.05;
  in.k_max = 4;
  const VarianceInterval exact_iv = transfer_interval_exact(vc, 1.0, in, 0.45, 2.05);
  int exact_in = 0, kde_in = 0;
  double max_eps = 0.0;
  for (int s = 0; s < kDatasets; ++s) {
    const Eigen::MatrixXd x = uniform_points(10000, 1, trial_seed(701, s));
    const Eigen::MatrixXd psi = build_feature_matrix(k, x);
    const Eigen::VectorXd f = x.col(0);
    exact_in += exact_iv.contains(discrete_variance_exact(build_discrete_dpp(psi, Eigen::VectorXd::Ones(10000)), f));
    const Eigen::VectorXd rho = DensityEstimate(x, KdeShape::epanechnikov).at_data();
    TransferBoundInputs kin = in;
    kin.epsilon = relative_error_diagnostic(Eigen::VectorXd::Ones(10000), rho);
    max_eps = std::max(max_eps, kin.epsilon);
    kde_in += transfer_interval_estimated(vc, 1.0, kin).contains(discrete_variance_exact(build_discrete_dpp(psi, rho), f));
  }
  const double s = t.seconds();
  report(7, exact_in >= 19 && kde_in >= 19 && s < 300.0,
         "variance transfer, exact " + std::to_string(exact_in) + "/20, kde " + std::to_string(kde_in) + "/20", s);
  note("V_c " + fmt("%.5f", vc) + ", interval [" + fmt("%.3f", exact_iv.lower) + ", " + fmt("%.3f", exact_iv.upper) +
       "], largest KDE relative error " + fmt("%.3f", max_eps));
}

void criterion8() {
  Timer t;
  const Dataset data = gen_gmm_trimodal(1024, 801);
  CoresetConfig cfg;
  cfg.k = 3;
  cfg.m_list = {64};
  cfg.samplers = {SamplerKind::iid, SamplerKind::haar, SamplerKind::db2};
  cfg.seed = 802;
  const auto rows = run_coreset_experiment(data, cfg);
  double q[3] = {0, 0, 0};  // db2, haar, iid after sorting
  for (std::size_t i = 0; i < 3; ++i) q[i] = rows[i].q90;
  const double s = t.seconds();
  report(8, q[1] <= q[2] && q[0] <= q[2] && s < 900.0,
         "coreset ordering, Q(0.9) iid " + fmt("%.3f", q[2]) + ", haar " + fmt("%.3f", q[1]) + ", db2 " + fmt("%.3f", q[0]),
         s);
  cfg.samplers = {SamplerKind::db2};
  cfg.design = DesignRule::support_center;
  note("db2 with support-centre design points: Q(0.9) " + fmt("%.3f", run_coreset_experiment(data, cfg).front().q90));
  note("haar realized rank " + std::to_string(rows[1].m_realized) + " of 64");
}

void criterion9() {
  Timer t;
  constexpr int kSeeds = 200;
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(2, 0.5);
  int wins = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const Dataset data = gen_two_class_gaussian(500, trial_seed(901, s));
    const PegasosProblem p = make_pegasos_problem(data, 0.7, trial_seed(902, s));
    const double iid = MinibatchSubgradient(p, SamplerKind::iid, 16).exact_trace_variance(theta);
    const double haar = MinibatchSubgradient(p, SamplerKind::haar, 16).exact_trace_variance(theta);
    wins += haar < iid;
  }
  const double pvalue = binomial_upper_tail(kSeeds, wins);

  const Dataset data = gen_two_class_gaussian(500, 903);
  PegasosConfig cfg;
  cfg.trials = 20;
  cfg.seed = 904;
  const auto rows = run_pegasos_experiment(data, cfg);
  bool decreasing = true;
  for (const auto& sampler : {"db2", "haar", "iid", "ope"}) {
    double first = 0, last = 0;
    for (const auto& r : rows) {
      if (r.sampler != sampler || r.metric != "param_error") continue;
      if (r.t == 1) first = r.value;
      if (r.t == cfg.iterations) last = r.value;
    }
    decreasing = decreasing && last < first;
  }
  const PegasosProblem p = make_pegasos_problem(data, cfg.train_fraction, cfg.seed);
  const double ref_grad = full_subgradient(p, pegasos_reference_solution(p, cfg.lambda), cfg.lambda).norm();
  const double s = t.seconds();
  report(9, pvalue < kSignTestLevel && decreasing && ref_grad < kReferenceGradTol,
         "minibatch variance, haar < iid on " + std::to_string(wins) + "/200 seeds (p " + fmt("%.2g", pvalue) +
             "), reference subgradient " + fmt("%.1e", ref_grad),
         s);
}

void criterion10() {
  Timer t;
  TransferBoundInputs in;
  in.n = 4;
  in.big_n = 1e4;
  in.delta = 0.1;
  in.delta_prime = 0.1;
  const double e = error_functional(in).error;
  // independent evaluation
  const double lg = std::log(170.0);
  const double independent = 4.0 * std::sqrt(2.0 * std::log(20.0) / 1e4) + 4.0 * lg * lg / 9e8 + 4e-4 * lg;
  bool monotone = true;
  double prev = 1e300;
  for (double n = 10; n <= 1e7; n *= 1.5) {
    in.big_n = n;
    const double v = error_functional(in).error;
    monotone = monotone && v < prev;
    prev = v;
  }
  const auto h = daubechies2_filter();
  const double sum_dev = std::abs(h[0] + h[1] + h[2] + h[3] - std::sqrt(2.0));
  const double shift_dev = std::abs(h[0] * h[2] + h[1] * h[3]);
  report(10,
         std::abs(e - 0.1) < kErrorFunctionalTol && std::abs(e - independent) < 1e-12 && monotone &&
             sum_dev < kFilterTol && shift_dev < kFilterTol,
         "formula diagnostics, E " + fmt("%.5f", e) + ", filter sum dev " + fmt("%.1e", sum_dev) + ", shift dev " +
             fmt("%.1e", shift_dev),
         t.seconds());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
