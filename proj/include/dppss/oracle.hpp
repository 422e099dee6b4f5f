#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "dppss/discretize.hpp"
#include "dppss/random.hpp"

namespace dppss {

/// Probability of every size-m subset, subsets in lexicographic order.
struct SubsetProbabilityTable {
  std::vector<std::vector<Eigen::Index>> subsets;
  std::vector<double> probabilities;

  double total() const {
    double s = 0.0;
    for (double p : probabilities) s += p;
    return s;
  }
};

inline constexpr double kMaxEnumeratedSubsets = 1e5;

inline double binomial(Eigen::Index n, Eigen::Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Eigen::Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Every m-subset of {0, ..., n-1} in lexicographic order.
inline std::vector<std::vector<Eigen::Index>> all_subsets(Eigen::Index n, Eigen::Index m) {
  std::vector<std::vector<Eigen::Index>> out;
  if (m < 0 || m > n) return out;
  std::vector<Eigen::Index> c(m);
  for (Eigen::Index i = 0; i < m; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    Eigen::Index i = m - 1;
    while (i >= 0 && c[i] == n - m + i) --i;
    if (i < 0) break;
    ++c[i];
    for (Eigen::Index r = i + 1; r < m; ++r) c[r] = c[r - 1] + 1;
  }
  return out;
}

/// P(S = J) = det(K_JJ), K_JJ = U_J U_J^T, by partial-pivot LU. Values above
/// -1e-12 are clamped to zero. Throws when C(N, m) > 1e5.
template <typename Scalar>
SubsetProbabilityTable enumerate_subset_probabilities(const DiscreteProjectionDPP<Scalar>& dpp) {
  const Eigen::Index n = dpp.size();
  const Eigen::Index m = dpp.rank();
  if (binomial(n, m) > kMaxEnumeratedSubsets)
    throw std::length_error("enumerate_subset_probabilities: too many subsets");
  SubsetProbabilityTable table;
  table.subsets = all_subsets(n, m);
  table.probabilities.reserve(table.subsets.size());
  MatrixX<Scalar> rows(m, m);
  for (const auto& subset : table.subsets) {
    for (Eigen::Index r = 0; r < m; ++r) rows.row(r) = dpp.basis().row(subset[r]);
    const MatrixX<Scalar> block = rows * rows.transpose();
    double p = static_cast<double>(block.partialPivLu().determinant());
    if (p < 0.0) {
      if (p < -1e-12) throw std::runtime_error("enumerate_subset_probabilities: negative determinant");
      p = 0.0;
    }
    table.probabilities.push_back(p);
  }
  return table;
}

/// Normalized counts of `trials` exact draws, laid out like the enumeration.
template <typename Scalar>
SubsetProbabilityTable empirical_subset_frequencies(const DiscreteProjectionDPP<Scalar>& dpp,
                                                    long trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("empirical_subset_frequencies: trials must be >= 1");
  SubsetProbabilityTable table;
  table.subsets = all_subsets(dpp.size(), dpp.rank());
  std::map<std::vector<Eigen::Index>, std::size_t> position;
  for (std::size_t i = 0; i < table.subsets.size(); ++i) position.emplace(table.subsets[i], i);
  std::vector<long> counts(table.subsets.size(), 0);
  for (long t = 0; t < trials; ++t) {
    const auto draw = sample_discrete(dpp, rng);
    const auto it = position.find(draw);
    if (it == position.end()) throw std::runtime_error("empirical_subset_frequencies: draw of wrong size");
    ++counts[it->second];
  }
  table.probabilities.reserve(counts.size());
  for (long c : counts) table.probabilities.push_back(static_cast<double>(c) / static_cast<double>(trials));
  return table;
}

/// (1/2) sum |p - q|.
inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: mismatched supports");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

inline double tv_distance(const SubsetProbabilityTable& p, const SubsetProbabilityTable& q) {
  if (p.subsets != q.subsets) throw std::invalid_argument("tv_distance: mismatched supports");
  return tv_distance(p.probabilities, q.probabilities);
}

/// Variance of Lambda(f) = sum_{i in S} f_i computed from an enumeration table.
inline double variance_from_table(const SubsetProbabilityTable& table, const Eigen::VectorXd& f) {
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t s = 0; s < table.subsets.size(); ++s) {
    double stat = 0.0;
    for (auto i : table.subsets[s]) stat += f[i];
    mean += table.probabilities[s] * stat;
    second += table.probabilities[s] * stat * stat;
  }
  return second - mean * mean;
}

}  // namespace dppss
