#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dppss/csv.hpp"
#include "dppss/datasets.hpp"
#include "dppss/density.hpp"
#include "dppss/discretize.hpp"
#include "dppss/estimators.hpp"
#include "dppss/kernels.hpp"
#include "dppss/random.hpp"

namespace dppss {

enum class SamplerKind { iid, haar, db2, ope };

SamplerKind parse_sampler(std::string_view name);
std::string_view sampler_name(SamplerKind kind);

/// Wavelet scale j with 2^{dj} = n; throws if n is not of that form.
int dyadic_scale_for(int n, int dim);

/// Continuous kernel backing a sampler at cardinality n: Haar (interior),
/// periodized db2, or OPE. Not defined for iid.
ProjectionKernel sampler_kernel(SamplerKind kind, int n, int dim);

/// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Linear-interpolation quantile (type 7) of unsorted values.
double empirical_quantile(std::vector<double> values, double q);

/// Unbiased sample variance.
double sample_variance(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureConfig {
  SamplerKind sampler = SamplerKind::haar;
  int dim = 1;
  std::string fn = "gamma";
  TestFunctionParams fn_params;
  std::string weight = "one";  ///< "one" or "bump"
  DesignRule design = DesignRule::support_center;  ///< db2 design points
  std::vector<int> n_list{4, 8, 16, 32, 64};
  int trials = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct QuadratureRow {
  std::string sampler;
  std::string fn;
  int dim = 1;
  int n = 0;
  int trials = 0;
  double mean = 0;
  double variance = 0;
  double mse = 0;
  double truth = 0;
  double slope = 0;  ///< log-log slope of variance over all n of the run
};

/// One estimator draw for the given sampler at cardinality n:
/// iid -> plain Monte Carlo mean, haar/ope -> quadrature_basic,
/// db2 -> quadrature_adjusted with the given design points.
double quadrature_draw(SamplerKind sampler, const ProjectionKernel* kernel, int n, int dim,
                       const TestFunction& f, const TestFunction& weight,
                       const Eigen::MatrixXd& design, Rng& rng);

/// int f w over [0,1]^d by the adaptive quadrature oracle.
double quadrature_truth(const TestFunction& f, const TestFunction& weight, int dim);

/// Empirical variance of `trials` estimator draws per n. Trial t at the i-th
/// n uses the stream trial_seed(trial_seed(seed, i), t).
std::vector<QuadratureRow> run_quadrature_experiment(const QuadratureConfig& config);
CsvTable quadrature_csv(const std::vector<QuadratureRow>& rows);

// ---------------------------------------------------------------------------
// Subset samplers over a finite dataset

/// Draws subsets of a dataset and turns them into unbiased estimates of column
/// totals sum_i values(i, c).
///
/// iid: `size` uniform draws with replacement, weight N/size.
/// haar, ope: discrete projection DPP from the pipeline with KDE density,
///   weight 1/K_ii.
/// db2: same pipeline on the periodized db2 kernel, adjusted by the discrete
///   control variate built from values at the design points (barycenter rule
///   by default, see DesignRule).
class SubsetSampler {
 public:
  SubsetSampler(SamplerKind kind, const Eigen::MatrixXd& points, int size, KdeShape kde,
                DesignRule design = DesignRule::barycenter);

  SamplerKind kind() const { return kind_; }
  Eigen::Index items() const { return items_; }
  /// Number of indices per draw (the pipeline rank for DPP samplers).
  Eigen::Index realized_size() const;

  std::vector<Eigen::Index> draw(Rng& rng) const;

  /// Rows of this matrix are where db2 needs values for its control variate;
  /// empty for other samplers.
  const Eigen::MatrixXd& design_points() const { return design_; }
  const std::optional<DiscreteDPP>& dpp() const { return dpp_; }
  const Eigen::MatrixXd& feature_matrix() const { return psi_; }

  Eigen::RowVectorXd estimate_totals(const std::vector<Eigen::Index>& subset,
                                     const Eigen::MatrixXd& values,
                                     const Eigen::MatrixXd& design_values = {}) const;

  /// Exact variance of estimate_totals for one column of values.
  double exact_variance(const Eigen::VectorXd& values,
                        const Eigen::VectorXd& design_values = {}) const;

 private:
  SamplerKind kind_;
  Eigen::Index items_;
  int size_;
  int scale_ = 0;
  int dim_ = 0;
  std::optional<DiscreteDPP> dpp_;
  Eigen::MatrixXd psi_;
  Eigen::RowVectorXd psi_colsum_;
  Eigen::MatrixXd design_;
};

// ---------------------------------------------------------------------------
// Coreset experiment (k-means)

struct CoresetConfig {
  int k = 3;
  std::vector<int> m_list{16, 64};
  int replicas = 150;
  int candidates = 150;
  std::vector<SamplerKind> samplers{SamplerKind::iid, SamplerKind::haar, SamplerKind::db2,
                                    SamplerKind::ope};
  KdeShape kde = KdeShape::epanechnikov;
  DesignRule design = DesignRule::barycenter;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct CoresetRow {
  std::string sampler;
  int m = 0;
  Eigen::Index m_realized = 0;
  int replicas = 0;
  int candidates = 0;
  double q90 = 0;
};

/// Candidate center sets: `count` draws of k distinct data indices.
std::vector<std::vector<Eigen::Index>> draw_candidate_centers(Eigen::Index n_items, int k, int count,
                                                              std::uint64_t seed);

/// For each (sampler, m): Q(0.9) over `replicas` coresets of
/// sup_C |L_S(f_C) - L(f_C)| / L(f_C), f_C the k-means loss of candidate C.
std::vector<CoresetRow> run_coreset_experiment(const Dataset& data, const CoresetConfig& config);
CsvTable coreset_csv(const std::vector<CoresetRow>& rows);

// ---------------------------------------------------------------------------
// Pegasos with minibatches

/// Two-class problem. Classifier inputs are z = 2x - 1 with x the dataset
/// point; labels are -1 for the smaller label value, +1 otherwise. Samplers see
/// each class's training points min-max rescaled into [0.02, 0.98]^d.
struct PegasosProblem {
  Eigen::MatrixXd train_x;
  Eigen::VectorXd train_y;
  Eigen::MatrixXd test_x;
  Eigen::VectorXd test_y;
  std::vector<Eigen::Index> class_rows[2];   ///< rows of train_x per class
  Eigen::MatrixXd class_points[2];           ///< sampler coordinates per class
};

PegasosProblem make_pegasos_problem(const Dataset& data, double train_fraction, std::uint64_t seed);

/// lambda/2 |theta|^2 + mean hinge loss on the training set.
double pegasos_objective(const PegasosProblem& problem, const Eigen::VectorXd& theta, double lambda);

/// lambda theta - (1/N) sum_{y<theta,x> < 1} y x over the training set.
Eigen::VectorXd full_subgradient(const PegasosProblem& problem, const Eigen::VectorXd& theta,
                                 double lambda);

/// Deterministic full-batch subgradient descent with step 1/(lambda t), stopped
/// when a step is shorter than `tolerance` or after `max_iterations`. Returns
/// the average of the second half of the iterates.
Eigen::VectorXd pegasos_reference_solution(const PegasosProblem& problem, double lambda,
                                           int max_iterations = 100000, double tolerance = 1e-8);

/// Per-class minibatch estimate of the subgradient
///   lambda theta - (1/N) sum_c T_c,
/// T_c the sampler's estimate of sum over class c of 1{y<theta,x> < 1} y x.
class MinibatchSubgradient {
 public:
  MinibatchSubgradient(const PegasosProblem& problem, SamplerKind kind, int batch_per_class,
                       KdeShape kde = KdeShape::gaussian,
                       DesignRule design = DesignRule::barycenter);

  Eigen::VectorXd draw(const Eigen::VectorXd& theta, double lambda, Rng& rng) const;
  /// Sum over coordinates of the exact variance of draw(theta, .).
  double exact_trace_variance(const Eigen::VectorXd& theta) const;
  const SubsetSampler& sampler(int cls) const { return samplers_[cls]; }

 private:
  /// Hinge-term values per training point of class `cls` (rows) and the same at
  /// the sampler's design points.
  void class_values(int cls, const Eigen::VectorXd& theta, Eigen::MatrixXd& values,
                    Eigen::MatrixXd& design_values) const;

  const PegasosProblem* problem_;
  std::vector<SubsetSampler> samplers_;
  Eigen::MatrixXd design_in_classifier_[2];
};

struct PegasosConfig {
  int batch_per_class = 16;
  int iterations = 200;
  double lambda = 0.1;
  int trials = 100;
  double train_fraction = 0.7;
  DesignRule design = DesignRule::barycenter;
  std::vector<SamplerKind> samplers{SamplerKind::iid, SamplerKind::haar, SamplerKind::db2,
                                    SamplerKind::ope};
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct PegasosRow {
  std::string sampler;
  int t = 0;
  std::string metric;  ///< test_error | grad_norm | param_error
  double value = 0;
  double stderr_ = 0;
};

std::vector<PegasosRow> run_pegasos_experiment(const Dataset& data, const PegasosConfig& config);
CsvTable pegasos_csv(const std::vector<PegasosRow>& rows);

}  // namespace dppss
