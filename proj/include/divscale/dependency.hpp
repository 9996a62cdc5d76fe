#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "divscale/trace.hpp"

namespace divscale {

// Hidden states with a norm below this are rejected: their cosine is undefined.
inline constexpr double kZeroNormThreshold = 1e-12;

// Sample-mean cosines for every position pair, 0-based, over positions
// 0..n_max-1. Pair (i, j) averages over the samples long enough to contain
// both positions.
class CosineStats {
 public:
  explicit CosineStats(std::size_t n_max);

  std::size_t n_max() const noexcept { return n_max_; }

  // E[cos(h_i^A, h_i^B)]
  double equal_ab(std::size_t i) const { return eq_[i]; }
  // E[cos(h_i^A, h_j^B)]; ordered, both (i, j) and (j, i) are kept.
  double cross_ab(std::size_t i, std::size_t j) const { return ab_[i * n_max_ + j]; }
  // E[cos(h_i^A, h_j^A)] and E[cos(h_i^B, h_j^B)]; symmetric in (i, j).
  double cross_aa(std::size_t i, std::size_t j) const { return aa_[i * n_max_ + j]; }
  double cross_bb(std::size_t i, std::size_t j) const { return bb_[i * n_max_ + j]; }
  // Number of samples containing position i (positions past every sample have 0).
  std::size_t count(std::size_t i) const { return counts_[i]; }
  // Samples that contributed to pair (i, j).
  std::size_t pair_count(std::size_t i, std::size_t j) const { return counts_[std::max(i, j)]; }

 private:
  friend CosineStats cosine_stats(const TraceSet& set, std::size_t n_max);

  std::size_t n_max_;
  std::vector<double> eq_;
  std::vector<double> ab_;
  std::vector<double> aa_;
  std::vector<double> bb_;
  std::vector<std::size_t> counts_;
};

// Throws EmptyPopulation for an empty set, ZeroVector when any hidden state in
// range has norm below kZeroNormThreshold.
CosineStats cosine_stats(const TraceSet& set, std::size_t n_max);

enum class DependencyMode {
  SupClamped,   // max{0, sup over pairs of the mean cosine}
  MeanClamped,  // max{0, average over pairs of the mean cosine}
  MeanRaw,      // average over pairs, unclamped (diagnostic)
};

std::string_view to_string(DependencyMode mode) noexcept;
DependencyMode parse_dependency_mode(std::string_view text);

// Dependency measures per sequence length; index k holds n = k + 1.
struct DependencyProfile {
  std::size_t n_max = 0;
  std::vector<double> psi_equal_ab;
  std::vector<double> psi_cross_ab;
  std::vector<double> psi_cross_aa;
  std::vector<double> psi_cross_bb;
  std::vector<double> psi_cross_sym;
  // False where no i != j pair exists yet (n = 1); the cross values there are 0.
  std::vector<bool> cross_defined;
  DependencyMode mode = DependencyMode::MeanClamped;
};

// Cosines are averaged over samples first; sup/mean over index pairs is taken
// on those averages.
DependencyProfile dependency_profile(const CosineStats& stats, DependencyMode mode);
DependencyProfile dependency_profile(const TraceSet& set, std::size_t n_max, DependencyMode mode);

enum class HistogramKind { EqualAB, CrossAB, CrossAABBavg };

std::string_view to_string(HistogramKind kind) noexcept;

struct CosineHistogram {
  HistogramKind kind = HistogramKind::EqualAB;
  std::vector<double> bin_edges;  // bins + 1 uniform edges on [-1, 1]
  std::vector<std::size_t> counts;
  std::size_t positive = 0;  // observations strictly above zero

  std::size_t total() const noexcept;
  double positive_fraction() const noexcept;
};

inline constexpr std::size_t kDefaultHistogramBins = 101;

// Histograms of the per-sample cosines cos(h_i^A, h_i^B), cos(h_i^A, h_j^B)
// for i != j, and (cos(h_i^A, h_j^A) + cos(h_i^B, h_j^B)) / 2 for i < j.
std::array<CosineHistogram, 3> cosine_histograms(const TraceSet& set, std::size_t n_max,
                                                 std::size_t bins = kDefaultHistogramBins);

}  // namespace divscale
