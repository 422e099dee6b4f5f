#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>

namespace dppss {

enum class KdeShape { epanechnikov, gaussian };

/// Scott's rule per dimension: h_i = sigma_i N^{-1/(d+4)}, sigma_i the unbiased
/// sample standard deviation. Throws on N < 2 or a constant coordinate.
Eigen::VectorXd scott_bandwidth(const Eigen::MatrixXd& data);

/// Product-kernel density estimate
///   rho(x) = (1/N) sum_i prod_j k((x_j - X_ij) / h_j) / h_j.
class DensityEstimate {
 public:
  DensityEstimate(Eigen::MatrixXd data, KdeShape shape, Eigen::VectorXd bandwidth);
  /// Bandwidth from scott_bandwidth.
  DensityEstimate(Eigen::MatrixXd data, KdeShape shape);

  double operator()(std::span<const double> x) const;
  /// Values at every row of `points`.
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const;
  /// Values at the training points.
  Eigen::VectorXd at_data() const { return evaluate(data_); }

  const Eigen::MatrixXd& data() const { return data_; }
  const Eigen::VectorXd& bandwidth() const { return bandwidth_; }
  KdeShape shape() const { return shape_; }

 private:
  Eigen::MatrixXd data_;
  KdeShape shape_;
  Eigen::VectorXd bandwidth_;
};

double kde_eval(const DensityEstimate& est, std::span<const double> x);

double kde_kernel(KdeShape shape, double u);

/// max_i |rho(X_i) / rho_hat(X_i) - 1| over the training points.
double relative_error_diagnostic(
    const DensityEstimate& est,
    const std::function<double(std::span<const double>)>& true_density,
    const Eigen::MatrixXd& data);

/// Same from precomputed values. Throws if some rho_hat(X_i) <= 0.
double relative_error_diagnostic(const Eigen::VectorXd& true_values,
                                 const Eigen::VectorXd& estimate_values);

}  // namespace dppss
