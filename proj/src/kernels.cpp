#include "dppss/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace dppss {

namespace {

void check_dim(std::span<const double> x, int dim) {
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("kernel: dimension mismatch");
}

}  // namespace

WaveletIndexSet wavelet_index_set(const ScalingFunction& sf, int scale, int dim,
                                  WaveletMode mode) {
  if (scale < 0 || dim < 1) throw std::invalid_argument("wavelet_index_set: bad scale or dim");
  WaveletIndexSet set;
  set.scale = scale;
  set.dim = dim;
  set.mode = mode;
  const long dyadic = 1L << scale;
  if (mode == WaveletMode::interior) {
    set.axis_lo = static_cast<int>(std::ceil(-sf.support_begin()));
    set.axis_hi = static_cast<int>(std::floor(static_cast<double>(dyadic) - sf.support_end()));
  } else {
    set.axis_lo = 0;
    set.axis_hi = static_cast<int>(dyadic - 1);
  }
  const int count = set.axis_count();
  if (count <= 0) return set;

  long total = 1;
  for (int i = 0; i < dim; ++i) total *= count;
  set.shifts.reserve(total);
  std::vector<int> k(dim, set.axis_lo);
  for (long t = 0; t < total; ++t) {
    set.shifts.push_back(k);
    for (int i = dim - 1; i >= 0; --i) {
      if (++k[i] <= set.axis_hi) break;
      k[i] = set.axis_lo;
    }
  }
  return set;
}

ProjectionKernel wavelet_kernel(const ScalingFunction& sf, int scale, int dim,
                                WaveletMode mode) {
  auto set = wavelet_index_set(sf, scale, dim, mode);
  if (set.shifts.empty()) throw std::invalid_argument("scale too coarse for support");
  ProjectionKernel kernel(KernelFamily::wavelet, dim, set.size(), sf);
  kernel.index_set_ = std::move(set);
  return kernel;
}

ProjectionKernel ope_kernel(int dim, int rank) {
  if (dim < 1 || rank < 1) throw std::invalid_argument("ope_kernel: need dim >= 1 and rank >= 1");
  ProjectionKernel kernel(KernelFamily::ope, dim, rank, ScalingFunction::haar());
  kernel.degrees_ = graded_multi_indices(dim, rank);
  for (const auto& alpha : kernel.degrees_)
    for (int a : alpha) kernel.max_degree_ = std::max(kernel.max_degree_, a);
  return kernel;
}

void ProjectionKernel::axis_values(double x, std::vector<double>& out) const {
  if (family_ == KernelFamily::wavelet) {
    const int count = index_set_.axis_count();
    out.resize(count);
    const bool periodized = index_set_.mode == WaveletMode::periodized;
    for (int c = 0; c < count; ++c)
      out[c] = eval_dilated(scaling_, index_set_.scale, index_set_.axis_lo + c, x, periodized);
    return;
  }
  // Three-term recurrence for Legendre P_k(t), t = 2x - 1, then normalize.
  out.resize(max_degree_ + 1);
  const double t = 2.0 * x - 1.0;
  double p_prev = 1.0;
  double p = t;
  out[0] = 1.0;
  if (max_degree_ >= 1) out[1] = std::sqrt(3.0) * t;
  for (int k = 1; k < max_degree_; ++k) {
    const double p_next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
    p_prev = p;
    p = p_next;
    out[k + 1] = std::sqrt(2.0 * (k + 1) + 1.0) * p;
  }
}

void ProjectionKernel::features(std::span<const double> x,
                                Eigen::Ref<Eigen::VectorXd> out) const {
  check_dim(x, dim_);
  thread_local std::vector<std::vector<double>> axes;
  axes.resize(dim_);
  for (int i = 0; i < dim_; ++i) axis_values(x[i], axes[i]);

  if (family_ == KernelFamily::wavelet) {
    const int lo = index_set_.axis_lo;
    for (int f = 0; f < rank_; ++f) {
      const auto& k = index_set_.shifts[f];
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) v *= axes[i][k[i] - lo];
      out[f] = v;
    }
  } else {
    for (int f = 0; f < rank_; ++f) {
      const auto& alpha = degrees_[f];
      double v = 1.0;
      for (int i = 0; i < dim_; ++i) v *= axes[i][alpha[i]];
      out[f] = v;
    }
  }
}

Eigen::VectorXd ProjectionKernel::features(std::span<const double> x) const {
  Eigen::VectorXd out(rank_);
  features(x, out);
  return out;
}

double ProjectionKernel::operator()(std::span<const double> x,
                                    std::span<const double> y) const {
  check_dim(y, dim_);
  return features(x).dot(features(y));
}

double ProjectionKernel::diagonal(std::span<const double> x) const {
  return features(x).squaredNorm();
}

FeatureBox ProjectionKernel::feature_box(int k) const {
  if (k < 0 || k >= rank_) throw std::out_of_range("feature_box: index out of range");
  FeatureBox box;
  box.lower = Eigen::VectorXd::Zero(dim_);
  box.width = Eigen::VectorXd::Ones(dim_);
  box.sup_bound = 1.0;
  if (family_ == KernelFamily::ope) {
    // |P_k| <= 1 on [-1,1], so |psi| <= prod sqrt(2 alpha_i + 1).
    for (int i = 0; i < dim_; ++i) box.sup_bound *= std::sqrt(2.0 * degrees_[k][i] + 1.0);
    return box;
  }
  const double dyadic = std::ldexp(1.0, index_set_.scale);
  const double a = scaling_.support_begin();
  const double b = scaling_.support_end();
  const double axis_amp = std::sqrt(dyadic) * scaling_.sup_norm();
  const bool periodized = index_set_.mode == WaveletMode::periodized;
  for (int i = 0; i < dim_; ++i) {
    const int shift = index_set_.shifts[k][i];
    if (periodized && dyadic < b - a) {
      // Several wrapped copies overlap: whole circle, summed bound.
      const double copies = std::ceil((b - a) / dyadic) + 1.0;
      box.sup_bound *= axis_amp * copies;
      continue;
    }
    double lower = (shift + a) / dyadic;
    if (periodized) lower -= std::floor(lower);
    box.lower[i] = lower;
    box.width[i] = (b - a) / dyadic;
    box.sup_bound *= axis_amp;
  }
  return box;
}

double kernel_eval(const ProjectionKernel& kernel, std::span<const double> x,
                   std::span<const double> y) {
  return kernel(x, y);
}

double shifted_legendre(int degree, double x) {
  if (degree < 0) throw std::invalid_argument("shifted_legendre: negative degree");
  const double t = 2.0 * x - 1.0;
  double p_prev = 1.0;
  double p = degree == 0 ? 1.0 : t;
  for (int k = 1; k < degree; ++k) {
    const double p_next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
    p_prev = p;
    p = p_next;
  }
  return std::sqrt(2.0 * degree + 1.0) * p;
}

std::vector<std::vector<int>> graded_multi_indices(int dim, int count) {
  std::vector<std::vector<int>> out;
  out.reserve(count);
  for (int grade = 0; static_cast<int>(out.size()) < count; ++grade) {
    // Enumerate compositions of `grade` into `dim` parts, lexicographically decreasing.
    std::vector<int> alpha(dim, 0);
    alpha[0] = grade;
    while (true) {
      out.push_back(alpha);
      if (static_cast<int>(out.size()) == count) return out;
      // Predecessor in lex order among compositions: find rightmost i < dim-1
      // with alpha[i] > 0, move one unit right and collapse the tail.
      int i = dim - 2;
      while (i >= 0 && alpha[i] == 0) --i;
      if (i < 0) break;
      --alpha[i];
      int tail = alpha[dim - 1] + 1;
      for (int r = i + 1; r < dim; ++r) alpha[r] = 0;
      alpha[i + 1] = tail;
    }
  }
  return out;
}

double scaling_barycenter(const ScalingFunction& sf) {
  if (sf.kind() == ScalingKind::haar) return 0.5;
  // int x phi = sum_k k h_k / sqrt(2), from the refinement equation.
  const auto h = daubechies2_filter();
  double acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) acc += static_cast<double>(k) * h[k];
  return acc / std::sqrt(2.0);
}

Eigen::MatrixXd design_points(const ProjectionKernel& kernel, DesignRule rule) {
  if (kernel.family() != KernelFamily::wavelet)
    throw std::invalid_argument("design_points: wavelet kernels only");
  const auto& set = kernel.index_set();
  const double dyadic = std::ldexp(1.0, set.scale);
  const double centre =
      rule == DesignRule::barycenter
          ? scaling_barycenter(kernel.scaling())
          : 0.5 * (kernel.scaling().support_begin() + kernel.scaling().support_end());
  const bool periodized = set.mode == WaveletMode::periodized;
  Eigen::MatrixXd pts(set.size(), set.dim);
  for (int f = 0; f < set.size(); ++f) {
    for (int i = 0; i < set.dim; ++i) {
      double c = (set.shifts[f][i] + centre) / dyadic;
      if (periodized) c -= std::floor(c);
      pts(f, i) = c;
    }
  }
  return pts;
}

}  // namespace dppss
