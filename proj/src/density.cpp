#include "dppss/density.hpp"

#include <cmath>
#include <stdexcept>

namespace dppss {

Eigen::VectorXd scott_bandwidth(const Eigen::MatrixXd& data) {
  const auto n = data.rows();
  const auto d = data.cols();
  if (n < 2) throw std::invalid_argument("scott_bandwidth: need at least two points");
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::RowVectorXd var =
      (data.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n - 1);
  if ((var.array() <= 0.0).any())
    throw std::invalid_argument("scott_bandwidth: zero variance in some dimension");
  const double factor = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
  return var.transpose().array().sqrt() * factor;
}

double kde_kernel(KdeShape shape, double u) {
  if (shape == KdeShape::epanechnikov) return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
}

DensityEstimate::DensityEstimate(Eigen::MatrixXd data, KdeShape shape,
                                 Eigen::VectorXd bandwidth)
    : data_(std::move(data)), shape_(shape), bandwidth_(std::move(bandwidth)) {
  if (data_.rows() == 0) throw std::invalid_argument("DensityEstimate: empty data");
  if (bandwidth_.size() != data_.cols())
    throw std::invalid_argument("DensityEstimate: bandwidth dimension mismatch");
  if ((bandwidth_.array() <= 0.0).any())
    throw std::invalid_argument("DensityEstimate: bandwidth must be positive");
}

DensityEstimate::DensityEstimate(Eigen::MatrixXd data, KdeShape shape)
    : DensityEstimate(data, shape, scott_bandwidth(data)) {}

double DensityEstimate::operator()(std::span<const double> x) const {
  const auto d = data_.cols();
  if (static_cast<Eigen::Index>(x.size()) != d)
    throw std::invalid_argument("kde_eval: dimension mismatch");
  const double norm = 1.0 / (static_cast<double>(data_.rows()) * bandwidth_.prod());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < data_.rows(); ++i) {
    double term = 1.0;
    for (Eigen::Index j = 0; j < d && term != 0.0; ++j)
      term *= kde_kernel(shape_, (x[j] - data_(i, j)) / bandwidth_[j]);
    acc += term;
  }
  return acc * norm;
}

Eigen::VectorXd DensityEstimate::evaluate(const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.rows());
  Eigen::VectorXd row(points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    row = points.row(i).transpose();
    out[i] = (*this)(std::span<const double>(row.data(), row.size()));
  }
  return out;
}

double kde_eval(const DensityEstimate& est, std::span<const double> x) { return est(x); }

double relative_error_diagnostic(const Eigen::VectorXd& true_values,
                                 const Eigen::VectorXd& estimate_values) {
  if (true_values.size() != estimate_values.size())
    throw std::invalid_argument("relative_error_diagnostic: size mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < true_values.size(); ++i) {
    if (!(estimate_values[i] > 0.0))
      throw std::domain_error("relative_error_diagnostic: density estimate not positive at a data point");
    worst = std::max(worst, std::abs(true_values[i] / estimate_values[i] - 1.0));
  }
  return worst;
}

double relative_error_diagnostic(
    const DensityEstimate& est,
    const std::function<double(std::span<const double>)>& true_density,
    const Eigen::MatrixXd& data) {
  Eigen::VectorXd truth(data.rows());
  Eigen::VectorXd row(data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    row = data.row(i).transpose();
    truth[i] = true_density(std::span<const double>(row.data(), row.size()));
  }
  return relative_error_diagnostic(truth, est.evaluate(data));
}

}  // namespace dppss
