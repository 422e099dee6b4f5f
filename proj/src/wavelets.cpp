#include "dppss/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dppss {

ScalingFunction::ScalingFunction(ScalingKind kind, double begin, double end,
                                 int levels, std::vector<double> table)
    : kind_(kind), begin_(begin), end_(end), levels_(levels), sup_norm_(1.0),
      table_(std::move(table)) {
  if (!table_.empty()) {
    sup_norm_ = 0.0;
    for (double v : table_) sup_norm_ = std::max(sup_norm_, std::abs(v));
  }
}

ScalingFunction ScalingFunction::haar() {
  return ScalingFunction(ScalingKind::haar, 0.0, 1.0, 0, {});
}

ScalingFunction ScalingFunction::daubechies2(int levels) {
  return daubechies2_cascade(levels);
}

double ScalingFunction::operator()(double x) const {
  if (kind_ == ScalingKind::haar) return haar_eval(x);
  if (x < begin_ || x > end_) return 0.0;
  const double t = (x - begin_) * std::ldexp(1.0, levels_);
  const auto last = static_cast<std::ptrdiff_t>(table_.size()) - 1;
  const auto i = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(t), last - 1);
  const double w = t - static_cast<double>(i);
  return (1.0 - w) * table_[i] + w * table_[i + 1];
}

std::array<double, 4> daubechies2_filter() {
  const double s3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  return {(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm, (1.0 - s3) / norm};
}

double haar_eval(double x) { return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0; }

ScalingFunction daubechies2_cascade(int levels) {
  if (levels < 6) throw std::invalid_argument("daubechies2_cascade: levels must be >= 6");
  const auto h = daubechies2_filter();
  const long per_unit = 1L << levels;
  const long last = 3 * per_unit;

  std::vector<double> phi(last + 1, 0.0);
  for (long i = 0; i < per_unit; ++i) phi[i] = 1.0;

  std::vector<double> next(last + 1);
  const double root2 = std::sqrt(2.0);
  for (int it = 0; it < kMaxCascadeIterations; ++it) {
    double diff = 0.0;
    for (long i = 0; i <= last; ++i) {
      // Grid point x = i 2^-levels; 2x - k lands on index 2i - k 2^levels.
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        const long idx = 2 * i - k * per_unit;
        if (idx >= 0 && idx <= last) acc += h[k] * phi[idx];
      }
      next[i] = root2 * acc;
      diff = std::max(diff, std::abs(next[i] - phi[i]));
    }
    phi.swap(next);
    if (diff < 1e-8)
      return ScalingFunction(ScalingKind::daubechies2, 0.0, 3.0, levels, std::move(phi));
  }
  throw std::runtime_error("daubechies2_cascade: no convergence after " +
                           std::to_string(kMaxCascadeIterations) + " iterations");
}

double eval_scaling(const ScalingFunction& sf, double x) { return sf(x); }

double eval_dilated(const ScalingFunction& sf, int scale, int shift, double x,
                    bool periodized) {
  const double dyadic = std::ldexp(1.0, scale);
  const double amp = std::sqrt(dyadic);
  const double u = dyadic * x - shift;
  if (!periodized) return amp * sf(u);
  const double a = sf.support_begin();
  const double b = sf.support_end();
  const auto p_lo = static_cast<long>(std::ceil((a - u) / dyadic));
  const auto p_hi = static_cast<long>(std::floor((b - u) / dyadic));
  double acc = 0.0;
  for (long p = p_lo; p <= p_hi; ++p) acc += sf(u + p * dyadic);
  return amp * acc;
}

double eval_tensor(const TensorWavelet& w, const ScalingFunction& sf,
                   std::span<const double> x) {
  if (static_cast<int>(x.size()) != w.dim())
    throw std::invalid_argument("eval_tensor: dimension mismatch");
  double v = 1.0;
  for (int i = 0; i < w.dim() && v != 0.0; ++i)
    v *= eval_dilated(sf, w.scale, w.shift[i], x[i], w.periodized);
  return v;
}

}  // namespace dppss
