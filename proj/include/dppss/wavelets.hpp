#pragma once

#include <array>
#include <span>
#include <vector>

namespace dppss {

enum class ScalingKind { haar, daubechies2 };

/// Compactly supported orthonormal scaling function on [support_begin, support_end].
///
/// Haar is evaluated analytically with the half-open convention 1_{[0,1)}.
/// Daubechies-2 is tabulated on the dyadic grid of step 2^-levels over [0,3]
/// by the cascade iteration and evaluated by linear interpolation.
class ScalingFunction {
 public:
  static ScalingFunction haar();
  static ScalingFunction daubechies2(int levels = 10);

  ScalingKind kind() const { return kind_; }
  double support_begin() const { return begin_; }
  double support_end() const { return end_; }
  int cascade_levels() const { return levels_; }
  const std::vector<double>& table() const { return table_; }

  /// Exact sup |phi| of the evaluated function (linear interpolation attains
  /// its extrema on grid nodes).
  double sup_norm() const { return sup_norm_; }

  double operator()(double x) const;

 private:
  ScalingFunction(ScalingKind kind, double begin, double end, int levels,
                  std::vector<double> table);
  friend ScalingFunction daubechies2_cascade(int levels);

  ScalingKind kind_;
  double begin_;
  double end_;
  int levels_;
  double sup_norm_;
  std::vector<double> table_;
};

/// Low-pass filter of the 4-tap Daubechies wavelet (sum = sqrt(2)).
std::array<double, 4> daubechies2_filter();

/// 1_{[0,1)}(x).
double haar_eval(double x);

/// Cascade iteration phi <- sqrt(2) sum_k h_k phi(2x - k) on the grid of step
/// 2^-levels, started from the Haar indicator. Throws if successive tables do
/// not agree to 1e-8 in sup norm within kMaxCascadeIterations.
ScalingFunction daubechies2_cascade(int levels);

inline constexpr int kMaxCascadeIterations = 60;

double eval_scaling(const ScalingFunction& sf, double x);

/// 2^{j/2} phi(2^j x - k), optionally periodized on [0,1): the argument is
/// wrapped modulo 2^j and every wrapped copy inside the support is summed.
double eval_dilated(const ScalingFunction& sf, int scale, int shift, double x,
                    bool periodized);

/// Tensor product Phi_{-j,k}(x) = prod_i 2^{j/2} phi(2^j x_i - k_i).
struct TensorWavelet {
  int scale = 0;
  std::vector<int> shift;
  bool periodized = false;

  int dim() const { return static_cast<int>(shift.size()); }
};

double eval_tensor(const TensorWavelet& w, const ScalingFunction& sf,
                   std::span<const double> x);

}  // namespace dppss
