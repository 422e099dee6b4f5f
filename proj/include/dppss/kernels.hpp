#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "dppss/wavelets.hpp"

namespace dppss {

enum class KernelFamily { wavelet, ope };
enum class WaveletMode { interior, periodized };

/// Shifts k in Z^d of the wavelet kernel at scale j.
///
/// interior:   ceil(-a) <= k_i <= floor(2^j - b), i.e. supp Phi_{-j,k} in [0,1]^d.
/// periodized: 0 <= k_i < 2^j.
struct WaveletIndexSet {
  int scale = 0;
  int dim = 0;
  WaveletMode mode = WaveletMode::interior;
  int axis_lo = 0;  ///< smallest 1-D shift
  int axis_hi = -1; ///< largest 1-D shift
  std::vector<std::vector<int>> shifts;

  int axis_count() const { return axis_hi - axis_lo + 1; }
  int size() const { return static_cast<int>(shifts.size()); }
};

WaveletIndexSet wavelet_index_set(const ScalingFunction& sf, int scale, int dim,
                                  WaveletMode mode);

/// Axis-aligned box (wrapped modulo 1 per axis when periodized) containing the
/// support of one feature, together with a bound on sup |feature|.
struct FeatureBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd width;
  double sup_bound = 0.0;
};

/// Projection kernel K(x,y) = sum_k psi_k(x) psi_k(y) built from n functions
/// orthonormal in L^2([0,1]^d).
class ProjectionKernel {
 public:
  int rank() const { return rank_; }
  int dim() const { return dim_; }
  KernelFamily family() const { return family_; }

  /// Wavelet-only accessors.
  int scale() const { return index_set_.scale; }
  WaveletMode mode() const { return index_set_.mode; }
  const WaveletIndexSet& index_set() const { return index_set_; }
  const ScalingFunction& scaling() const { return scaling_; }
  bool is_haar() const {
    return family_ == KernelFamily::wavelet && scaling_.kind() == ScalingKind::haar;
  }

  /// OPE-only: multi-index (per-axis degree) of each feature.
  const std::vector<std::vector<int>>& degrees() const { return degrees_; }

  /// Feature vector (psi_1(x), ..., psi_n(x)).
  Eigen::VectorXd features(std::span<const double> x) const;
  void features(std::span<const double> x, Eigen::Ref<Eigen::VectorXd> out) const;

  double operator()(std::span<const double> x, std::span<const double> y) const;
  double diagonal(std::span<const double> x) const;

  FeatureBox feature_box(int k) const;

 private:
  friend ProjectionKernel wavelet_kernel(const ScalingFunction&, int, int, WaveletMode);
  friend ProjectionKernel ope_kernel(int, int);

  ProjectionKernel(KernelFamily family, int dim, int rank, ScalingFunction sf)
      : family_(family), dim_(dim), rank_(rank), scaling_(std::move(sf)) {}

  void axis_values(double x, std::vector<double>& out) const;

  KernelFamily family_;
  int dim_;
  int rank_;
  ScalingFunction scaling_;
  WaveletIndexSet index_set_;
  std::vector<std::vector<int>> degrees_;
  int max_degree_ = 0;
};

/// Wavelet DPP kernel sum_{k in I(j)} Phi_{-j,k}(x) Phi_{-j,k}(y).
/// Throws std::invalid_argument("scale too coarse for support") if I(j) is empty.
ProjectionKernel wavelet_kernel(const ScalingFunction& sf, int scale, int dim,
                                WaveletMode mode);

/// Multivariate OPE kernel for the uniform measure on [0,1]^d: the first n
/// tensor-product shifted Legendre polynomials in graded order.
ProjectionKernel ope_kernel(int dim, int rank);

double kernel_eval(const ProjectionKernel& kernel, std::span<const double> x,
                   std::span<const double> y);

/// Orthonormal shifted Legendre polynomial sqrt(2k+1) P_k(2x-1) on [0,1].
double shifted_legendre(int degree, double x);

/// First n multi-indices of Z_{>=0}^d by total degree; within a degree,
/// lexicographically decreasing ((1,0) before (0,1)).
std::vector<std::vector<int>> graded_multi_indices(int dim, int count);

enum class DesignRule { barycenter, support_center };

/// int x phi(x) dx: 1/2 for Haar, (3 - sqrt 3)/2 for Daubechies-2.
double scaling_barycenter(const ScalingFunction& sf);

/// One design point per feature, (k + c) 2^-j per axis with c the barycenter of
/// phi or the midpoint of its support, wrapped into [0,1) when periodized. Both
/// lie in the feature's support and coincide for Haar. Rows align with feature
/// order. Wavelet kernels only.
Eigen::MatrixXd design_points(const ProjectionKernel& kernel,
                              DesignRule rule = DesignRule::support_center);

}  // namespace dppss
