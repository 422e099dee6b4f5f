#include "dppss/discretize.hpp"

#include <cmath>
#include <stdexcept>

namespace dppss {

Eigen::MatrixXd build_feature_matrix(const ProjectionKernel& kernel,
                                     const Eigen::MatrixXd& points) {
  if (points.cols() != kernel.dim())
    throw std::invalid_argument("build_feature_matrix: dimension mismatch");
  if (points.size() && ((points.array() < 0.0).any() || (points.array() > 1.0).any()))
    throw std::domain_error("build_feature_matrix: point outside [0,1]^d");
  Eigen::MatrixXd psi(points.rows(), kernel.rank());
  Eigen::VectorXd row(points.cols());
  Eigen::VectorXd phi(kernel.rank());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    row = points.row(i).transpose();
    kernel.features(std::span<const double>(row.data(), row.size()), phi);
    psi.row(i) = phi.transpose();
  }
  return psi;
}

ErrorFunctionals error_functional(const TransferBoundInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0) || !(in.delta_prime > 0.0 && in.delta_prime < 1.0))
    throw std::invalid_argument("error_functional: delta and delta' must lie in (0,1)");
  if (!(in.big_n > 0.0) || !(in.n > 0.0))
    throw std::invalid_argument("error_functional: n and N must be positive");
  const double big_n = in.big_n;
  const double head = 4.0 * std::sqrt(2.0 * std::log(2.0 / in.delta_prime) / big_n);
  const double lg = std::log((in.n * in.n + 1.0) / in.delta);
  const double quad = lg * lg / (9.0 * big_n * big_n);
  const double lin = lg / big_n;
  return {head + 4.0 * quad + 4.0 * lin, head + (in.n + 4.0) * quad + (in.n + 4.0) * lin};
}

VarianceInterval transfer_interval_exact(double continuous_variance, double sup_f,
                                         const TransferBoundInputs& in,
                                         double lower_scale, double upper_scale) {
  const double err = 4.0 * sup_f * sup_f * in.k_max * in.k_max * error_functional(in).error;
  return {lower_scale * continuous_variance - err, upper_scale * continuous_variance + err};
}

VarianceInterval transfer_interval_estimated(double continuous_variance, double sup_f,
                                             const TransferBoundInputs& in) {
  const double e = in.epsilon;
  const double f2 = sup_f * sup_f;
  const double k2e = in.k_max * in.k_max * error_functional(in).error;
  const double lower = (in.big_n - 1.0) / (2.0 * in.big_n) * (1.0 - e) * (1.0 - e) *
                           continuous_variance -
                       16.0 * f2 * k2e - 4.0 * f2 * e * e * in.n;
  const double upper = 2.0 * (1.0 + e) * (1.0 + e) * continuous_variance + 32.0 * f2 * k2e +
                       8.0 * f2 * e * e * in.n;
  return {lower, upper};
}

}  // namespace dppss
