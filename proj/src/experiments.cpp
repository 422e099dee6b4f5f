#include "dppss/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dppss/continuous_sampler.hpp"
#include "dppss/quadrature.hpp"

namespace dppss {

namespace {

const ScalingFunction& cached_db2() {
  static const ScalingFunction sf = ScalingFunction::daubechies2();
  return sf;
}

// Seed of the stream owned by (sampler, size) inside one experiment.
std::uint64_t stream_seed(std::uint64_t master, SamplerKind kind, int size) {
  return trial_seed(trial_seed(master, static_cast<std::uint64_t>(kind) + 1),
                    static_cast<std::uint64_t>(size));
}

constexpr std::uint64_t kCandidateStream = 0x63616e6469646174ULL;
constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;

}  // namespace

SamplerKind parse_sampler(std::string_view name) {
  if (name == "iid") return SamplerKind::iid;
  if (name == "haar") return SamplerKind::haar;
  if (name == "db2") return SamplerKind::db2;
  if (name == "ope") return SamplerKind::ope;
  throw std::invalid_argument("unknown sampler '" + std::string(name) + "'");
}

std::string_view sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::iid: return "iid";
    case SamplerKind::haar: return "haar";
    case SamplerKind::db2: return "db2";
    case SamplerKind::ope: return "ope";
  }
  return "?";
}

int dyadic_scale_for(int n, int dim) {
  if (dim < 1) throw std::invalid_argument("dyadic_scale_for: dim must be >= 1");
  for (int j = 0; dim * j < 31; ++j) {
    const long size = 1L << (dim * j);
    if (size == n) return j;
    if (size > n) break;
  }
  throw std::invalid_argument("size " + std::to_string(n) + " is not 2^(" + std::to_string(dim) +
                              "j) for a wavelet sampler");
}

ProjectionKernel sampler_kernel(SamplerKind kind, int n, int dim) {
  switch (kind) {
    case SamplerKind::haar:
      return wavelet_kernel(ScalingFunction::haar(), dyadic_scale_for(n, dim), dim,
                            WaveletMode::interior);
    case SamplerKind::db2:
      return wavelet_kernel(cached_db2(), dyadic_scale_for(n, dim), dim, WaveletMode::periodized);
    case SamplerKind::ope:
      return ope_kernel(dim, n);
    case SamplerKind::iid:
      break;
  }
  throw std::invalid_argument("sampler_kernel: iid has no kernel");
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 pairs");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("fit_loglog_slope: non-positive value");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("fit_loglog_slope: constant x");
  return (n * sxy - sx * sy) / denom;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("empirical_quantile: q outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double sample_variance(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size() - 1);
}

// ---------------------------------------------------------------------------

double quadrature_draw(SamplerKind sampler, const ProjectionKernel* kernel, int n, int dim,
                       const TestFunction& f, const TestFunction& weight,
                       const Eigen::MatrixXd& design, Rng& rng) {
  if (sampler == SamplerKind::iid) {
    Eigen::VectorXd x(dim);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < dim; ++c) x[c] = uniform01(rng);
      acc += f(x) * weight(x);
    }
    return acc / n;
  }
  if (!kernel) throw std::invalid_argument("quadrature_draw: DPP sampler needs a kernel");
  const ContinuousSample sample = sample_continuous(*kernel, rng);
  if (sampler == SamplerKind::db2) return quadrature_adjusted(sample.points, *kernel, f, weight, design);
  return quadrature_basic(sample.points, *kernel, f, weight);
}

double quadrature_truth(const TestFunction& f, const TestFunction& weight, int dim) {
  std::vector<double> breaks = f.breakpoints;
  breaks.insert(breaks.end(), weight.breakpoints.begin(), weight.breakpoints.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (dim == 1) {
    return integrate_adaptive(
        [&](double t) {
          const double x[1] = {t};
          return f(std::span<const double>(x, 1)) * weight(std::span<const double>(x, 1));
        },
        0.0, 1.0, 1e-12, breaks);
  }
  if (dim == 2) {
    return integrate_adaptive_2d(
        [&](double s, double t) {
          const double x[2] = {s, t};
          return f(std::span<const double>(x, 2)) * weight(std::span<const double>(x, 2));
        },
        1e-10, breaks);
  }
  throw std::invalid_argument("quadrature_truth: d <= 2 only");
}

std::vector<QuadratureRow> run_quadrature_experiment(const QuadratureConfig& config) {
  if (config.dim < 1 || config.dim > 2) throw std::invalid_argument("quadrature: d must be 1 or 2");
  if (config.trials < 2) throw std::invalid_argument("quadrature: need at least two trials");
  if (config.n_list.empty()) throw std::invalid_argument("quadrature: empty n list");
  const TestFunction f = test_function_library(config.fn, config.fn_params);
  TestFunction weight;
  if (config.weight == "one") weight = unit_weight();
  else if (config.weight == "bump") weight = bump_weight();
  else throw std::invalid_argument("quadrature: unknown weight '" + config.weight + "'");
  const double truth = quadrature_truth(f, weight, config.dim);

  std::vector<QuadratureRow> rows;
  std::vector<double> ns, variances;
  for (std::size_t idx = 0; idx < config.n_list.size(); ++idx) {
    const int n = config.n_list[idx];
    if (n < 1) throw std::invalid_argument("quadrature: n must be >= 1");
    std::optional<ProjectionKernel> kernel;
    Eigen::MatrixXd design;
    if (config.sampler != SamplerKind::iid) {
      kernel = sampler_kernel(config.sampler, n, config.dim);
      if (config.sampler == SamplerKind::db2) design = design_points(*kernel, config.design);
    }
    const std::uint64_t base = trial_seed(config.seed, idx);
    std::vector<double> draws(static_cast<std::size_t>(config.trials));
    parallel_for(draws.size(), config.threads, [&](std::size_t t) {
      Rng rng(trial_seed(base, t));
      draws[t] = quadrature_draw(config.sampler, kernel ? &*kernel : nullptr, n, config.dim, f,
                                 weight, design, rng);
    });

    QuadratureRow row;
    row.sampler = std::string(sampler_name(config.sampler));
    row.fn = f.name;
    row.dim = config.dim;
    row.n = n;
    row.trials = config.trials;
    row.truth = truth;
    row.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(draws.size());
    row.variance = sample_variance(draws);
    double mse = 0.0;
    for (double v : draws) mse += (v - truth) * (v - truth);
    row.mse = mse / static_cast<double>(draws.size());
    rows.push_back(row);
    ns.push_back(n);
    variances.push_back(row.variance);
  }
  const double slope = rows.size() >= 2 ? fit_loglog_slope(ns, variances) : std::nan("");
  for (auto& r : rows) r.slope = slope;
  std::sort(rows.begin(), rows.end(), [](const QuadratureRow& a, const QuadratureRow& b) { return a.n < b.n; });
  return rows;
}

CsvTable quadrature_csv(const std::vector<QuadratureRow>& rows) {
  CsvTable t;
  t.header = {"sampler", "fn", "d", "n", "trials", "variance", "slope"};
  for (const auto& r : rows)
    t.rows.push_back({r.sampler, r.fn, std::to_string(r.dim), std::to_string(r.n),
                      std::to_string(r.trials), format_number(r.variance), format_number(r.slope)});
  return t;
}

// ---------------------------------------------------------------------------

SubsetSampler::SubsetSampler(SamplerKind kind, const Eigen::MatrixXd& points, int size, KdeShape kde,
                             DesignRule design)
    : kind_(kind), items_(points.rows()), size_(size), dim_(static_cast<int>(points.cols())) {
  if (size < 1) throw std::invalid_argument("SubsetSampler: size must be >= 1");
  if (size > items_) throw std::invalid_argument("SubsetSampler: size exceeds the number of items");
  if (kind == SamplerKind::iid) return;
  const ProjectionKernel kernel = sampler_kernel(kind, size, dim_);
  scale_ = kernel.family() == KernelFamily::wavelet ? kernel.scale() : 0;
  psi_ = build_feature_matrix(kernel, points);
  const Eigen::VectorXd rho = DensityEstimate(points, kde).at_data();
  dpp_.emplace(build_discrete_dpp(psi_, rho));
  if (kind == SamplerKind::db2) {
    design_ = dppss::design_points(kernel, design);
    psi_colsum_ = psi_.colwise().sum();
  }
}

Eigen::Index SubsetSampler::realized_size() const { return dpp_ ? dpp_->rank() : size_; }

std::vector<Eigen::Index> SubsetSampler::draw(Rng& rng) const {
  if (dpp_) return sample_discrete(*dpp_, rng);
  std::vector<Eigen::Index> out(static_cast<std::size_t>(size_));
  for (auto& i : out) i = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(items_)));
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::RowVectorXd SubsetSampler::estimate_totals(const std::vector<Eigen::Index>& subset,
                                                  const Eigen::MatrixXd& values,
                                                  const Eigen::MatrixXd& design_values) const {
  if (values.rows() != items_) throw std::invalid_argument("estimate_totals: values do not match the items");
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(values.cols());
  if (!dpp_) {
    for (auto i : subset) acc += values.row(i);
    return acc * (static_cast<double>(items_) / size_);
  }
  const bool adjust = kind_ == SamplerKind::db2;
  const double c = std::sqrt(std::ldexp(1.0, -dim_ * scale_));
  if (adjust && (design_values.rows() != design_.rows() || design_values.cols() != values.cols()))
    throw std::invalid_argument("estimate_totals: db2 needs values at the design points");
  for (auto i : subset) {
    const double p = dpp_->inclusion_probability(i);
    if (!(p > 0.0)) throw std::domain_error("estimate_totals: zero inclusion probability");
    if (adjust) acc += (values.row(i) - c * psi_.row(i) * design_values) / p;
    else acc += values.row(i) / p;
  }
  if (adjust) acc += c * psi_colsum_ * design_values;
  return acc;
}

double SubsetSampler::exact_variance(const Eigen::VectorXd& values,
                                     const Eigen::VectorXd& design_values) const {
  if (values.size() != items_) throw std::invalid_argument("exact_variance: values do not match the items");
  if (!dpp_) {
    const double n = static_cast<double>(items_);
    const double pop = (values.array() - values.mean()).square().sum() / n;
    return n * n / size_ * pop;
  }
  Eigen::VectorXd g = values;
  if (kind_ == SamplerKind::db2) {
    if (design_values.size() != design_.rows())
      throw std::invalid_argument("exact_variance: db2 needs values at the design points");
    g -= discrete_control_variate(psi_, scale_, dim_, design_values).values;
  }
  const Eigen::VectorXd inv = dpp_->inclusion_probabilities().cwiseInverse();
  return discrete_variance_exact(*dpp_, g, &inv);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Eigen::Index>> draw_candidate_centers(Eigen::Index n_items, int k, int count,
                                                              std::uint64_t seed) {
  if (k < 1 || k > n_items) throw std::invalid_argument("draw_candidate_centers: need 1 <= k <= N");
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n_items));
  for (int c = 0; c < count; ++c) {
    Rng rng(trial_seed(seed, static_cast<std::uint64_t>(c)));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto j = static_cast<std::size_t>(i) + uniform_index(rng, pool.size() - static_cast<std::size_t>(i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    out.emplace_back(pool.begin(), pool.begin() + k);
  }
  return out;
}

namespace {

Eigen::MatrixXd kmeans_values(const Eigen::MatrixXd& points, const Eigen::MatrixXd& data,
                              const std::vector<std::vector<Eigen::Index>>& candidates) {
  Eigen::MatrixXd out(points.rows(), static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    TestFunctionParams params;
    params.centers.resize(static_cast<Eigen::Index>(candidates[c].size()), data.cols());
    for (std::size_t r = 0; r < candidates[c].size(); ++r)
      params.centers.row(static_cast<Eigen::Index>(r)) = data.row(candidates[c][r]);
    const TestFunction f = test_function_library("kmeans_loss", params);
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      out(i, static_cast<Eigen::Index>(c)) = f(points.row(i).transpose().eval());
  }
  return out;
}

}  // namespace

std::vector<CoresetRow> run_coreset_experiment(const Dataset& data, const CoresetConfig& config) {
  if (config.replicas < 1 || config.candidates < 1) throw std::invalid_argument("coreset: replicas and candidates must be >= 1");
  const auto candidates =
      draw_candidate_centers(data.size(), config.k, config.candidates, trial_seed(config.seed, kCandidateStream));
  const Eigen::MatrixXd values = kmeans_values(data.points, data.points, candidates);
  const Eigen::RowVectorXd totals = values.colwise().sum();
  if ((totals.array() <= 0.0).any()) throw std::domain_error("coreset: zero full-data loss");

  std::vector<CoresetRow> rows;
  for (SamplerKind kind : config.samplers) {
    for (int m : config.m_list) {
      const SubsetSampler sampler(kind, data.points, m, config.kde, config.design);
      Eigen::MatrixXd design_values;
      if (kind == SamplerKind::db2) design_values = kmeans_values(sampler.design_points(), data.points, candidates);
      const std::uint64_t base = stream_seed(config.seed, kind, m);
      std::vector<double> sup_errors(static_cast<std::size_t>(config.replicas));
      parallel_for(sup_errors.size(), config.threads, [&](std::size_t r) {
        Rng rng(trial_seed(base, r));
        const auto subset = sampler.draw(rng);
        const Eigen::RowVectorXd est = sampler.estimate_totals(subset, values, design_values);
        sup_errors[r] = ((est - totals).cwiseAbs().array() / totals.array()).maxCoeff();
      });
      CoresetRow row;
      row.sampler = std::string(sampler_name(kind));
      row.m = m;
      row.m_realized = sampler.realized_size();
      row.replicas = config.replicas;
      row.candidates = config.candidates;
      row.q90 = empirical_quantile(sup_errors, 0.9);
      rows.push_back(row);
    }
  }
  std::sort(rows.begin(), rows.end(), [](const CoresetRow& a, const CoresetRow& b) {
    return std::tie(a.sampler, a.m) < std::tie(b.sampler, b.m);
  });
  return rows;
}

CsvTable coreset_csv(const std::vector<CoresetRow>& rows) {
  CsvTable t;
  t.header = {"sampler", "m", "m_realized", "replicas", "candidates", "q90"};
  for (const auto& r : rows)
    t.rows.push_back({r.sampler, std::to_string(r.m), std::to_string(r.m_realized),
                      std::to_string(r.replicas), std::to_string(r.candidates), format_number(r.q90)});
  return t;
}

// ---------------------------------------------------------------------------

PegasosProblem make_pegasos_problem(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (data.labels.size() != static_cast<std::size_t>(data.size()))
    throw std::invalid_argument("pegasos: dataset needs one label per point");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("pegasos: train fraction must lie in (0,1)");
  std::vector<int> distinct(data.labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) throw std::invalid_argument("pegasos: need exactly two classes");

  Rng rng(trial_seed(seed, kSplitStream));
  std::vector<Eigen::Index> train, test;
  std::vector<int> train_class;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < data.size(); ++i)
      if (data.labels[static_cast<std::size_t>(i)] == distinct[static_cast<std::size_t>(cls)]) idx.push_back(i);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    const auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(idx.size())));
    if (cut < 2 || cut == idx.size()) throw std::invalid_argument("pegasos: class too small to split");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i < cut) {
        train.push_back(idx[i]);
        train_class.push_back(cls);
      } else {
        test.push_back(idx[i]);
      }
    }
  }

  PegasosProblem p;
  const int d = data.dim();
  p.train_x.resize(static_cast<Eigen::Index>(train.size()), d);
  p.train_y.resize(static_cast<Eigen::Index>(train.size()));
  for (std::size_t r = 0; r < train.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    p.train_x.row(row) = 2.0 * data.points.row(train[r]).array() - 1.0;
    p.train_y[row] = train_class[r] == 0 ? -1.0 : 1.0;
    p.class_rows[train_class[r]].push_back(row);
  }
  p.test_x.resize(static_cast<Eigen::Index>(test.size()), d);
  p.test_y.resize(static_cast<Eigen::Index>(test.size()));
  for (std::size_t r = 0; r < test.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    p.test_x.row(row) = 2.0 * data.points.row(test[r]).array() - 1.0;
    p.test_y[row] = data.labels[static_cast<std::size_t>(test[r])] == distinct[0] ? -1.0 : 1.0;
  }
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(p.class_rows[cls].size()), d);
    for (std::size_t r = 0; r < p.class_rows[cls].size(); ++r)
      raw.row(static_cast<Eigen::Index>(r)) = p.train_x.row(p.class_rows[cls][r]);
    p.class_points[cls] = minmax_rescale(raw).forward(raw);
  }
  return p;
}

double pegasos_objective(const PegasosProblem& problem, const Eigen::VectorXd& theta, double lambda) {
  const Eigen::VectorXd margins = problem.train_y.cwiseProduct(problem.train_x * theta);
  return 0.5 * lambda * theta.squaredNorm() + (1.0 - margins.array()).max(0.0).mean();
}

Eigen::VectorXd full_subgradient(const PegasosProblem& problem, const Eigen::VectorXd& theta,
                                 double lambda) {
  const Eigen::VectorXd margins = problem.train_y.cwiseProduct(problem.train_x * theta);
  Eigen::VectorXd g = lambda * theta;
  const double n = static_cast<double>(problem.train_x.rows());
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    if (margins[i] < 1.0) g -= problem.train_y[i] * problem.train_x.row(i).transpose() / n;
  return g;
}

Eigen::VectorXd pegasos_reference_solution(const PegasosProblem& problem, double lambda,
                                           int max_iterations, double tolerance) {
  if (!(lambda > 0.0)) throw std::invalid_argument("pegasos: lambda must be positive");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(problem.train_x.cols());
  std::vector<Eigen::VectorXd> history;
  history.reserve(static_cast<std::size_t>(max_iterations));
  for (int t = 1; t <= max_iterations; ++t) {
    const Eigen::VectorXd step = full_subgradient(problem, theta, lambda) / (lambda * t);
    theta -= step;
    history.push_back(theta);
    if (step.norm() < tolerance) break;
  }
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(theta.size());
  const std::size_t from = history.size() / 2;
  for (std::size_t i = from; i < history.size(); ++i) avg += history[i];
  return avg / static_cast<double>(history.size() - from);
}

MinibatchSubgradient::MinibatchSubgradient(const PegasosProblem& problem, SamplerKind kind,
                                           int batch_per_class, KdeShape kde, DesignRule design)
    : problem_(&problem) {
  for (int cls = 0; cls < 2; ++cls) {
    if (static_cast<int>(problem.class_rows[cls].size()) < batch_per_class)
      throw std::invalid_argument("pegasos: class too small for a per-class minibatch");
    samplers_.emplace_back(kind, problem.class_points[cls], batch_per_class, kde, design);
    const Eigen::MatrixXd& design = samplers_.back().design_points();
    if (design.rows() == 0) continue;
    // Design points live in the sampler's rescaled coordinates; map them back.
    Eigen::MatrixXd raw(static_cast<Eigen::Index>(problem.class_rows[cls].size()), problem.train_x.cols());
    for (std::size_t r = 0; r < problem.class_rows[cls].size(); ++r)
      raw.row(static_cast<Eigen::Index>(r)) = problem.train_x.row(problem.class_rows[cls][r]);
    design_in_classifier_[cls] = minmax_rescale(raw).inverse(design);
  }
}

void MinibatchSubgradient::class_values(int cls, const Eigen::VectorXd& theta, Eigen::MatrixXd& values,
                                        Eigen::MatrixXd& design_values) const {
  const auto& rows = problem_->class_rows[cls];
  const double y = cls == 0 ? -1.0 : 1.0;
  values.resize(static_cast<Eigen::Index>(rows.size()), theta.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto x = problem_->train_x.row(rows[r]);
    values.row(static_cast<Eigen::Index>(r)) =
        y * x.dot(theta) < 1.0 ? Eigen::RowVectorXd(y * x) : Eigen::RowVectorXd::Zero(theta.size());
  }
  const Eigen::MatrixXd& design = design_in_classifier_[cls];
  design_values.resize(design.rows(), theta.size());
  for (Eigen::Index k = 0; k < design.rows(); ++k)
    design_values.row(k) = y * design.row(k).dot(theta) < 1.0 ? Eigen::RowVectorXd(y * design.row(k))
                                                             : Eigen::RowVectorXd::Zero(theta.size());
}

Eigen::VectorXd MinibatchSubgradient::draw(const Eigen::VectorXd& theta, double lambda, Rng& rng) const {
  Eigen::VectorXd g = lambda * theta;
  const double n = static_cast<double>(problem_->train_x.rows());
  Eigen::MatrixXd values, design_values;
  for (int cls = 0; cls < 2; ++cls) {
    class_values(cls, theta, values, design_values);
    const auto subset = samplers_[cls].draw(rng);
    g -= samplers_[cls].estimate_totals(subset, values, design_values).transpose() / n;
  }
  return g;
}

double MinibatchSubgradient::exact_trace_variance(const Eigen::VectorXd& theta) const {
  const double n = static_cast<double>(problem_->train_x.rows());
  Eigen::MatrixXd values, design_values;
  double total = 0.0;
  for (int cls = 0; cls < 2; ++cls) {
    class_values(cls, theta, values, design_values);
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const Eigen::VectorXd dv = design_values.rows() ? Eigen::VectorXd(design_values.col(j)) : Eigen::VectorXd();
      total += samplers_[cls].exact_variance(values.col(j), dv);
    }
  }
  return total / (n * n);
}

namespace {

double test_error(const PegasosProblem& p, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd scores = p.test_x * theta;
  long wrong = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if ((scores[i] >= 0.0 ? 1.0 : -1.0) != p.test_y[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

}  // namespace

std::vector<PegasosRow> run_pegasos_experiment(const Dataset& data, const PegasosConfig& config) {
  if (config.iterations < 1 || config.trials < 2) throw std::invalid_argument("pegasos: need T >= 1 and >= 2 trials");
  const PegasosProblem problem = make_pegasos_problem(data, config.train_fraction, config.seed);
  const Eigen::VectorXd reference = pegasos_reference_solution(problem, config.lambda);
  const std::vector<std::string> metrics = {"grad_norm", "param_error", "test_error"};

  std::vector<PegasosRow> rows;
  for (SamplerKind kind : config.samplers) {
    const MinibatchSubgradient oracle(problem, kind, config.batch_per_class, KdeShape::gaussian, config.design);
    const std::uint64_t base = stream_seed(config.seed, kind, config.batch_per_class);
    // traces[trial](t, metric)
    std::vector<Eigen::MatrixXd> traces(static_cast<std::size_t>(config.trials));
    parallel_for(traces.size(), config.threads, [&](std::size_t tr) {
      Rng rng(trial_seed(base, tr));
      Eigen::VectorXd theta = Eigen::VectorXd::Zero(problem.train_x.cols());
      Eigen::MatrixXd& out = traces[tr];
      out.resize(config.iterations, 3);
      for (int t = 1; t <= config.iterations; ++t) {
        theta -= oracle.draw(theta, config.lambda, rng) / (config.lambda * t);
        out(t - 1, 0) = full_subgradient(problem, theta, config.lambda).norm();
        out(t - 1, 1) = (theta - reference).norm();
        out(t - 1, 2) = test_error(problem, theta);
      }
    });
    for (int t = 0; t < config.iterations; ++t) {
      for (int m = 0; m < 3; ++m) {
        std::vector<double> v;
        v.reserve(traces.size());
        for (const auto& tr : traces) v.push_back(tr(t, m));
        PegasosRow row;
        row.sampler = std::string(sampler_name(kind));
        row.t = t + 1;
        row.metric = metrics[static_cast<std::size_t>(m)];
        row.value = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        row.stderr_ = std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
        rows.push_back(row);
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const PegasosRow& a, const PegasosRow& b) {
    return std::tie(a.sampler, a.t, a.metric) < std::tie(b.sampler, b.t, b.metric);
  });
  return rows;
}

CsvTable pegasos_csv(const std::vector<PegasosRow>& rows) {
  CsvTable t;
  t.header = {"sampler", "t", "metric", "value", "stderr"};
  for (const auto& r : rows)
    t.rows.push_back({r.sampler, std::to_string(r.t), r.metric, format_number(r.value), format_number(r.stderr_)});
  return t;
}

}  // namespace dppss
