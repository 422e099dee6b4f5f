#include "dppss/continuous_sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace dppss {

ContinuousSample sample_stratified_haar(int scale, int dim, Rng& rng) {
  if (scale < 0 || dim < 1) throw std::invalid_argument("sample_stratified_haar: bad scale or dim");
  const long cells = 1L << scale;
  long n = 1;
  for (int i = 0; i < dim; ++i) n *= cells;
  const double width = 1.0 / static_cast<double>(cells);

  ContinuousSample sample;
  sample.points.resize(n, dim);
  std::vector<long> k(dim, 0);
  for (long row = 0; row < n; ++row) {
    for (int i = 0; i < dim; ++i) {
      double y = (static_cast<double>(k[i]) + uniform01(rng)) * width;
      // Guard against rounding onto the right edge of the half-open cell.
      if (y >= (k[i] + 1) * width) y = std::nextafter((k[i] + 1) * width, 0.0);
      sample.points(row, i) = y;
    }
    for (int i = dim - 1; i >= 0; --i) {
      if (++k[i] < cells) break;
      k[i] = 0;
    }
  }
  return sample;
}

namespace {

/// Draws x with density psi_k(x)^2 by rejection from the feature's box.
void sample_squared_feature(const ProjectionKernel& kernel, const FeatureBox& box,
                            int k, Rng& rng, Eigen::Ref<Eigen::VectorXd> x,
                            Eigen::Ref<Eigen::VectorXd> phi) {
  const int dim = kernel.dim();
  const double bound2 = box.sup_bound * box.sup_bound;
  for (long tries = 0; tries < kMaxRejectionsPerPoint; ++tries) {
    for (int i = 0; i < dim; ++i) {
      double v = box.lower[i] + box.width[i] * uniform01(rng);
      if (v >= 1.0) v -= std::floor(v);
      x[i] = v;
    }
    kernel.features(std::span<const double>(x.data(), dim), phi);
    const double value = phi[k] * phi[k];
    if (value > bound2 * (1.0 + 1e-12))
      throw std::runtime_error("sample_projection_chain: feature exceeds its sup bound");
    if (uniform01(rng) * bound2 < value) return;
  }
  throw std::runtime_error("sample_projection_chain: rejection limit reached in feature draw");
}

}  // namespace

ContinuousSample sample_projection_chain(const ProjectionKernel& kernel, Rng& rng) {
  const int n = kernel.rank();
  const int dim = kernel.dim();

  std::vector<FeatureBox> boxes;
  boxes.reserve(n);
  for (int k = 0; k < n; ++k) boxes.push_back(kernel.feature_box(k));

  ContinuousSample sample;
  sample.points.resize(n, dim);
  Eigen::MatrixXd used(n, n);  // orthonormal directions in feature space
  Eigen::VectorXd x(dim), phi(n), coeff;

  for (int step = 0; step < n; ++step) {
    const auto basis = used.leftCols(step);
    long rejected = 0;
    double residual = 0.0;
    while (true) {
      const int k = static_cast<int>(uniform_index(rng, n));
      sample_squared_feature(kernel, boxes[k], k, rng, x, phi);
      const double diag = phi.squaredNorm();
      coeff = basis.transpose() * phi;
      residual = diag - coeff.squaredNorm();
      if (residual > diag * (1.0 + 1e-9) + 1e-12)
        throw std::runtime_error("sample_projection_chain: envelope violated");
      if (uniform01(rng) * diag < residual) break;
      if (++rejected > kMaxRejectionsPerPoint)
        throw std::runtime_error("sample_projection_chain: rejection limit reached");
    }
    sample.points.row(step) = x.transpose();

    // New direction: phi(x) minus its projection, reorthogonalized twice.
    Eigen::VectorXd dir = phi - basis * coeff;
    dir -= basis * (basis.transpose() * dir);
    used.col(step) = dir / dir.norm();
  }
  return sample;
}

ContinuousSample sample_continuous(const ProjectionKernel& kernel, Rng& rng) {
  if (kernel.is_haar()) return sample_stratified_haar(kernel.scale(), kernel.dim(), rng);
  return sample_projection_chain(kernel, rng);
}

}  // namespace dppss
