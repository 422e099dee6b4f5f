#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dppss/discretize.hpp"
#include "dppss/kernels.hpp"

namespace dppss {

/// f : [0,1]^d -> R with regularity metadata.
struct TestFunction {
  std::string name;
  std::function<double(std::span<const double>)> eval;
  std::optional<double> holder_exponent;  ///< s in (0,1]; empty when smooth
  bool vanishes_on_boundary = false;
  std::vector<double> breakpoints;  ///< per-axis kinks, used by the quadrature oracle

  double operator()(std::span<const double> x) const { return eval(x); }
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return eval(std::span<const double>(x.data(), x.size()));
  }
};

struct TestFunctionParams {
  double gamma = 0.75;
  Eigen::MatrixXd centers;  ///< kmeans_loss: one center per row
  Eigen::VectorXd theta;    ///< hinge_loss
};

/// Library of named test functions:
///   gamma     (1/d) sum_i |x_i - 1/2|^g / int_0^1 |t - 1/2|^g
///   mixcos    (1/d) sum_i f_mc(x_i) / int f_mc,  f_mc(t) = 0.1|cos(5 pi (t - 1/2))| + (t - 1/2)^2
///   bump      prod_i f_b(x_i) / int f_b,          f_b(t) = exp(-0.1 / (t (1 - t)))
///   kmeans_loss  min_c |x - c|^2
///   hinge_loss   max(0, 1 - y <theta, x>) on points (x, y) whose last coordinate is the label
/// Throws std::invalid_argument on an unknown name.
TestFunction test_function_library(std::string_view name, const TestFunctionParams& params = {});

/// One-dimensional factors before normalization.
double gamma_factor(double t, double gamma);
double mixcos_factor(double t);
double bump_factor(double t);

/// Weight functions omega for the quadrature estimators.
TestFunction unit_weight();
/// C^1 biweight bump (15/16r)(1 - u^2)^2, u = (t - 1/2)/r, r = 0.4, per axis;
/// integrates to one and is supported in [0.1, 0.9]^d.
TestFunction bump_weight();

/// sum over rows of `points` of f.
double linear_statistic(const Eigen::MatrixXd& points, const TestFunction& f);

/// sum_i f(Y_i) w(Y_i) / K(Y_i, Y_i).
double quadrature_basic(const Eigen::MatrixXd& points, const ProjectionKernel& kernel,
                        const TestFunction& f, const TestFunction& weight);

/// Control-variate statistic
///   L(f) - 2^{-dj/2} sum_i sum_k Phi_k(Y_i)/K(Y_i,Y_i) f(x_k)w(x_k) + 2^{-dj} sum_k f(x_k)w(x_k)
/// with one design point x_k per feature (rows of `design`).
double quadrature_adjusted(const Eigen::MatrixXd& points, const ProjectionKernel& kernel,
                           const TestFunction& f, const TestFunction& weight,
                           const Eigen::MatrixXd& design);

/// sum_{i in S} f(X_i) / K_ii, conditionally unbiased for sum_i f(X_i).
double coreset_estimate(const std::vector<Eigen::Index>& subset, const DiscreteDPP& dpp,
                        const Eigen::VectorXd& f_values);
double coreset_estimate(const std::vector<Eigen::Index>& subset, const DiscreteDPP& dpp,
                        const TestFunction& f, const Eigen::MatrixXd& data);

/// Discrete control variate for a wavelet feature matrix:
///   c(X_i) = 2^{-dj/2} sum_k Psi(i,k) f(x_k).
/// Built from f at the n design points only.
struct DiscreteControlVariate {
  Eigen::VectorXd values;  ///< c(X_i) for every data point
  double total = 0;        ///< sum_i c(X_i)
};

DiscreteControlVariate discrete_control_variate(const Eigen::MatrixXd& psi, int scale, int dim,
                                                const Eigen::VectorXd& f_at_design);

/// sum_{i in S} (f(X_i) - c(X_i)) / K_ii + sum_i c(X_i).
double coreset_estimate_adjusted(const std::vector<Eigen::Index>& subset, const DiscreteDPP& dpp,
                                 const Eigen::VectorXd& f_values,
                                 const DiscreteControlVariate& control);

/// Midpoint tensor grid used by continuous_variance_exact.
inline constexpr int kVarianceGrid1d = 2048;
inline constexpr int kVarianceGrid2d = 256;

/// Var[Lambda(f)] = int f^2 K(x,x) - int int f(x) f(y) K(x,y)^2, evaluated by the
/// midpoint rule on a tensor grid (`resolution` per axis, defaulting to the
/// constants above). The double integral is computed as |sum_x w f(x) phi(x)phi(x)^T|_F^2.
double continuous_variance_exact(const ProjectionKernel& kernel,
                                 const std::function<double(std::span<const double>)>& f,
                                 int resolution = 0);

inline constexpr Eigen::Index kDiscreteVarianceMaxItems = 50'000;

/// (1/2) sum_{i,j} (g_i - g_j)^2 K_ij^2 for g = f_values (times `weights` if
/// given). K is formed in row blocks from U. Throws when N exceeds
/// kDiscreteVarianceMaxItems.
double discrete_variance_exact(const DiscreteDPP& dpp, const Eigen::VectorXd& f_values,
                               const Eigen::VectorXd* weights = nullptr);

}  // namespace dppss
