#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "divscale/trace.hpp"

namespace divscale {

enum class EstimatorMode {
  NormOfSum,   // || sum_i (h_i^A - h_i^B) ||
  SumOfNorms,  // sum_i || h_i^A - h_i^B ||
};

std::string_view to_string(EstimatorMode mode) noexcept;
EstimatorMode parse_estimator_mode(std::string_view text);

// Population divergence statistics; index k holds the value for n = k + 1.
struct DivergenceCurve {
  std::size_t n_max = 0;
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<std::size_t> counts;
  EstimatorMode mode = EstimatorMode::NormOfSum;
  // Set when some n had a single contributing sample (std reported as 0).
  bool single_sample_std = false;
  // Set when the requested n_max exceeded the longest sample and the curve was
  // cut at the longest sample length.
  bool truncated = false;
};

// Per-position divergence of one pair; element k is D(k + 1).
std::vector<double> divergence_single(const BranchPairTrace& pair, EstimatorMode mode);

// Averages divergence_single over samples with length >= n for each n.
// Throws EmptyPopulation when no sample exists.
DivergenceCurve divergence_curve(const TraceSet& set, std::size_t n_max,
                                 EstimatorMode mode = EstimatorMode::NormOfSum);

struct NormBound {
  double m = 0.0;
};

// Largest mean-over-samples hidden-state norm over positions 1..n_max and both
// branches. Throws EmptyPopulation for an empty set.
NormBound norm_bound(const TraceSet& set, std::size_t n_max);

}  // namespace divscale
