#include "divscale/dependency.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "divscale/error.hpp"
#include "parallel.hpp"

namespace divscale {

namespace {

// Rows of one branch scaled to unit norm, in double precision.
std::vector<double> unit_rows(const BranchPairTrace& pair, bool branch_a, std::size_t len) {
  const std::size_t dim = pair.dim();
  std::vector<double> rows(len * dim);
  for (std::size_t i = 0; i < len; ++i) {
    const auto src = branch_a ? pair.a(i) : pair.b(i);
    double sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) sq += static_cast<double>(src[d]) * src[d];
    const double norm = std::sqrt(sq);
    if (norm < kZeroNormThreshold) {
      throw Error(ErrorKind::ZeroVector, std::string("hidden state at position ") + std::to_string(i + 1) +
                                             " of branch " + (branch_a ? "A" : "B") + " has zero norm");
    }
    for (std::size_t d = 0; d < dim; ++d) rows[i * dim + d] = src[d] / norm;
  }
  return rows;
}

double dot(const double* x, const double* y, std::size_t dim) {
  double s = 0.0;
  for (std::size_t d = 0; d < dim; ++d) s += x[d] * y[d];
  return s;
}

double cosine(const double* x, const double* y, std::size_t dim) {
  return std::clamp(dot(x, y, dim), -1.0, 1.0);
}

// Cosine matrices of one sample over its first `len` positions, row-major len x len.
struct SampleCosines {
  std::size_t len = 0;
  std::vector<double> ab, aa, bb;
};

SampleCosines sample_cosines(const BranchPairTrace& pair, std::size_t len) {
  const std::size_t dim = pair.dim();
  const auto ua = unit_rows(pair, true, len);
  const auto ub = unit_rows(pair, false, len);
  SampleCosines c;
  c.len = len;
  c.ab.resize(len * len);
  c.aa.assign(len * len, 1.0);
  c.bb.assign(len * len, 1.0);
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < len; ++j) c.ab[i * len + j] = cosine(&ua[i * dim], &ub[j * dim], dim);
    for (std::size_t j = i + 1; j < len; ++j) {
      c.aa[i * len + j] = c.aa[j * len + i] = cosine(&ua[i * dim], &ua[j * dim], dim);
      c.bb[i * len + j] = c.bb[j * len + i] = cosine(&ub[i * dim], &ub[j * dim], dim);
    }
  }
  return c;
}

}  // namespace

CosineStats::CosineStats(std::size_t n_max)
    : n_max_(n_max),
      eq_(n_max, 0.0),
      ab_(n_max * n_max, 0.0),
      aa_(n_max * n_max, 0.0),
      bb_(n_max * n_max, 0.0),
      counts_(n_max, 0) {}

CosineStats cosine_stats(const TraceSet& set, std::size_t n_max) {
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, "cosine statistics of an empty trace set");
  if (n_max == 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");

  CosineStats sums = detail::chunked_reduce(
      set.size(), CosineStats(n_max),
      [&](CosineStats& part, std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          const std::size_t len = std::min(n_max, set[s].n());
          const auto c = sample_cosines(set[s], len);
          for (std::size_t i = 0; i < len; ++i) {
            part.counts_[i] += 1;
            part.eq_[i] += c.ab[i * len + i];
            for (std::size_t j = 0; j < len; ++j) {
              part.ab_[i * n_max + j] += c.ab[i * len + j];
              part.aa_[i * n_max + j] += c.aa[i * len + j];
              part.bb_[i * n_max + j] += c.bb[i * len + j];
            }
          }
        }
      },
      [](CosineStats& total, const CosineStats& part) {
        for (std::size_t k = 0; k < total.eq_.size(); ++k) {
          total.eq_[k] += part.eq_[k];
          total.counts_[k] += part.counts_[k];
        }
        for (std::size_t k = 0; k < total.ab_.size(); ++k) {
          total.ab_[k] += part.ab_[k];
          total.aa_[k] += part.aa_[k];
          total.bb_[k] += part.bb_[k];
        }
      });

  for (std::size_t i = 0; i < n_max; ++i) {
    if (sums.counts_[i] == 0) continue;
    sums.eq_[i] /= static_cast<double>(sums.counts_[i]);
  }
  for (std::size_t i = 0; i < n_max; ++i) {
    for (std::size_t j = 0; j < n_max; ++j) {
      const std::size_t c = sums.pair_count(i, j);
      if (c == 0) continue;
      const std::size_t k = i * n_max + j;
      sums.ab_[k] /= static_cast<double>(c);
      sums.aa_[k] /= static_cast<double>(c);
      sums.bb_[k] /= static_cast<double>(c);
    }
  }
  return sums;
}

std::string_view to_string(DependencyMode mode) noexcept {
  switch (mode) {
    case DependencyMode::SupClamped: return "sup";
    case DependencyMode::MeanClamped: return "mean";
    case DependencyMode::MeanRaw: return "raw";
  }
  return "unknown";
}

DependencyMode parse_dependency_mode(std::string_view text) {
  if (text == "sup") return DependencyMode::SupClamped;
  if (text == "mean") return DependencyMode::MeanClamped;
  if (text == "raw") return DependencyMode::MeanRaw;
  throw Error(ErrorKind::InvalidArgument, "unknown dependency mode '" + std::string(text) + "'");
}

namespace {

// Running sup or mean over a growing set of values.
class Aggregate {
 public:
  explicit Aggregate(DependencyMode mode) : mode_(mode) {}

  void add(double v) {
    max_ = std::max(max_, v);
    sum_ += v;
    ++count_;
  }
  bool empty() const { return count_ == 0; }
  double value() const {
    if (count_ == 0) return 0.0;
    const double v = mode_ == DependencyMode::SupClamped ? max_ : sum_ / static_cast<double>(count_);
    return mode_ == DependencyMode::MeanRaw ? v : std::max(0.0, v);
  }

 private:
  DependencyMode mode_;
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace

DependencyProfile dependency_profile(const CosineStats& stats, DependencyMode mode) {
  const std::size_t n_max = stats.n_max();
  DependencyProfile p;
  p.n_max = n_max;
  p.mode = mode;
  p.psi_equal_ab.resize(n_max);
  p.psi_cross_ab.resize(n_max);
  p.psi_cross_aa.resize(n_max);
  p.psi_cross_bb.resize(n_max);
  p.psi_cross_sym.resize(n_max);
  p.cross_defined.resize(n_max);

  Aggregate eq(mode), ab(mode), aa(mode), bb(mode);
  for (std::size_t k = 0; k < n_max; ++k) {
    // Pairs whose larger index is k enter at n = k + 1.
    if (stats.count(k) > 0) {
      eq.add(stats.equal_ab(k));
      for (std::size_t j = 0; j < k; ++j) {
        ab.add(stats.cross_ab(k, j));
        ab.add(stats.cross_ab(j, k));
        aa.add(stats.cross_aa(j, k));
        bb.add(stats.cross_bb(j, k));
      }
    }
    p.psi_equal_ab[k] = eq.value();
    p.cross_defined[k] = !ab.empty();
    p.psi_cross_ab[k] = ab.value();
    p.psi_cross_aa[k] = aa.value();
    p.psi_cross_bb[k] = bb.value();
    p.psi_cross_sym[k] = (p.psi_cross_aa[k] + p.psi_cross_bb[k]) / 2.0;
  }
  return p;
}

DependencyProfile dependency_profile(const TraceSet& set, std::size_t n_max, DependencyMode mode) {
  return dependency_profile(cosine_stats(set, n_max), mode);
}

std::string_view to_string(HistogramKind kind) noexcept {
  switch (kind) {
    case HistogramKind::EqualAB: return "equal_ab";
    case HistogramKind::CrossAB: return "cross_ab";
    case HistogramKind::CrossAABBavg: return "cross_aabb_avg";
  }
  return "unknown";
}

std::size_t CosineHistogram::total() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

double CosineHistogram::positive_fraction() const noexcept {
  const std::size_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(positive) / static_cast<double>(n);
}

std::array<CosineHistogram, 3> cosine_histograms(const TraceSet& set, std::size_t n_max,
                                                 std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::InvalidArgument, "histogram needs at least one bin");
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, "histograms of an empty trace set");

  std::array<CosineHistogram, 3> hist;
  const HistogramKind kinds[3] = {HistogramKind::EqualAB, HistogramKind::CrossAB, HistogramKind::CrossAABBavg};
  for (std::size_t h = 0; h < 3; ++h) {
    hist[h].kind = kinds[h];
    hist[h].counts.assign(bins, 0);
    hist[h].bin_edges.resize(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) {
      hist[h].bin_edges[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(bins);
    }
    hist[h].bin_edges[bins] = 1.0;
  }

  auto bin_of = [bins](double c) {
    const double pos = (c + 1.0) / 2.0 * static_cast<double>(bins);
    if (!(pos > 0.0)) return std::size_t{0};
    return std::min(bins - 1, static_cast<std::size_t>(pos));
  };

  return detail::chunked_reduce(
      set.size(), hist,
      [&](std::array<CosineHistogram, 3>& part, std::size_t begin, std::size_t end) {
        auto record = [&](CosineHistogram& target, double c) {
          target.counts[bin_of(c)] += 1;
          if (c > 0.0) target.positive += 1;
        };
        for (std::size_t s = begin; s < end; ++s) {
          const std::size_t len = std::min(n_max, set[s].n());
          const auto c = sample_cosines(set[s], len);
          for (std::size_t i = 0; i < len; ++i) {
            record(part[0], c.ab[i * len + i]);
            for (std::size_t j = 0; j < len; ++j) {
              if (j == i) continue;
              record(part[1], c.ab[i * len + j]);
              if (j > i) record(part[2], (c.aa[i * len + j] + c.bb[i * len + j]) / 2.0);
            }
          }
        }
      },
      [](std::array<CosineHistogram, 3>& total, const std::array<CosineHistogram, 3>& part) {
        for (std::size_t h = 0; h < 3; ++h) {
          for (std::size_t k = 0; k < total[h].counts.size(); ++k) total[h].counts[k] += part[h].counts[k];
          total[h].positive += part[h].positive;
        }
      });
}

}  // namespace divscale
