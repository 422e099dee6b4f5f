#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "dppss/discretize.hpp"
#include "dppss/random.hpp"
#include "dppss/wavelets.hpp"

namespace dppss {

struct ValidationOptions {
  /// Replace the exact discrete sampler by a tampered one (negative control).
  bool inject_bias = false;
  std::uint64_t seed = 20240611;
  unsigned threads = 1;
};

struct ValidationCheck {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0;
  double threshold = 0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
};

/// Suites: oracle, partition, unbiasedness, transfer, slope; "all" runs every
/// one. Throws std::invalid_argument for another selector.
ValidationReport run_validation(std::string_view selector, const ValidationOptions& options = {});

/// One "suite,check,PASS|FAIL,value,threshold" line per check after a header.
void print_report(std::ostream& out, const ValidationReport& report);

/// max over an evenly spaced grid of `points` nodes in [0,1) of
/// |sum_k 2^{-j/2} phi_{j,k}(x) - 1|, k over the periodized or interior index
/// range.
double partition_of_unity_deviation(const ScalingFunction& sf, int scale, bool periodized, int points);

/// The exact sampler, or with `biased` a tampered one that returns the m most
/// likely items in three draws out of ten.
std::vector<Eigen::Index> validation_draw(const DiscreteDPP& dpp, Rng& rng, bool biased);

}  // namespace dppss
