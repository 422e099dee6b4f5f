#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "dppss/kernels.hpp"
#include "dppss/random.hpp"

namespace dppss {

/// n points of a projection DPP on [0,1)^d, one per row. Row order carries no
/// meaning; the sample is a set.
struct ContinuousSample {
  Eigen::MatrixXd points;
  std::uint64_t seed = 0;
};

/// Haar wavelet DPP at scale j: one independent uniform point in each of the
/// 2^{dj} half-open dyadic cells, rows ordered like the kernel's shifts.
ContinuousSample sample_stratified_haar(int scale, int dim, Rng& rng);

/// Sequential (chain-rule) exact sampler for any ProjectionKernel.
///
/// Step i draws from p_i(x) = (K(x,x) - |P_i phi(x)|^2) / (n - i + 1), P_i being
/// the projection onto the feature-space directions already used. Proposals
/// come from the one-point intensity K(x,x)/n, itself sampled as a mixture of
/// the squared features using each feature's support box and sup bound, and
/// are accepted with probability residual(x) / K(x,x).
///
/// Throws std::runtime_error if a residual exceeds K(x,x) (broken invariant) or
/// if 10^6 proposals are rejected for one point.
ContinuousSample sample_projection_chain(const ProjectionKernel& kernel, Rng& rng);

/// Haar wavelet kernels go through the stratified shortcut, everything else
/// through the chain sampler.
ContinuousSample sample_continuous(const ProjectionKernel& kernel, Rng& rng);

inline constexpr long kMaxRejectionsPerPoint = 1'000'000;

}  // namespace dppss
