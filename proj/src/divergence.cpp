#include "divscale/divergence.hpp"

#include <algorithm>
#include <cmath>

#include "divscale/error.hpp"
#include "parallel.hpp"

namespace divscale {

std::string_view to_string(EstimatorMode mode) noexcept {
  return mode == EstimatorMode::NormOfSum ? "norm-of-sum" : "sum-of-norms";
}

EstimatorMode parse_estimator_mode(std::string_view text) {
  if (text == "norm-of-sum") return EstimatorMode::NormOfSum;
  if (text == "sum-of-norms") return EstimatorMode::SumOfNorms;
  throw Error(ErrorKind::InvalidArgument, "unknown estimator '" + std::string(text) + "'");
}

std::vector<double> divergence_single(const BranchPairTrace& pair, EstimatorMode mode) {
  const std::size_t dim = pair.dim();
  std::vector<double> out(pair.n());
  std::vector<double> cumulative(dim, 0.0);
  double running = 0.0;
  for (std::size_t i = 0; i < pair.n(); ++i) {
    const auto a = pair.a(i);
    const auto b = pair.b(i);
    double sq = 0.0;
    if (mode == EstimatorMode::NormOfSum) {
      for (std::size_t d = 0; d < dim; ++d) {
        cumulative[d] += static_cast<double>(a[d]) - static_cast<double>(b[d]);
        sq += cumulative[d] * cumulative[d];
      }
      out[i] = std::sqrt(sq);
    } else {
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
        sq += diff * diff;
      }
      running += std::sqrt(sq);
      out[i] = running;
    }
  }
  return out;
}

DivergenceCurve divergence_curve(const TraceSet& set, std::size_t n_max, EstimatorMode mode) {
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, "divergence curve of an empty trace set");
  if (n_max == 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");

  DivergenceCurve curve;
  curve.mode = mode;
  curve.n_max = std::min(n_max, set.max_length());
  curve.truncated = curve.n_max < n_max;
  const std::size_t len = curve.n_max;

  struct Sums {
    std::vector<double> sum, sum_sq;
    std::vector<std::size_t> count;
  };
  const Sums zero{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0),
                  std::vector<std::size_t>(len, 0)};
  // Two passes (mean first, then centred squares) keep the variance stable.
  Sums sums = detail::chunked_reduce(
      set.size(), zero,
      [&](Sums& part, std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          const auto d = divergence_single(set[s], mode);
          for (std::size_t k = 0; k < std::min(len, d.size()); ++k) {
            part.sum[k] += d[k];
            part.count[k] += 1;
          }
        }
      },
      [](Sums& total, const Sums& part) {
        for (std::size_t k = 0; k < total.sum.size(); ++k) {
          total.sum[k] += part.sum[k];
          total.count[k] += part.count[k];
        }
      });

  curve.mean.resize(len);
  curve.counts = sums.count;
  for (std::size_t k = 0; k < len; ++k) curve.mean[k] = sums.sum[k] / static_cast<double>(sums.count[k]);

  Sums centred = detail::chunked_reduce(
      set.size(), zero,
      [&](Sums& part, std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          const auto d = divergence_single(set[s], mode);
          for (std::size_t k = 0; k < std::min(len, d.size()); ++k) {
            const double dev = d[k] - curve.mean[k];
            part.sum_sq[k] += dev * dev;
          }
        }
      },
      [](Sums& total, const Sums& part) {
        for (std::size_t k = 0; k < total.sum_sq.size(); ++k) total.sum_sq[k] += part.sum_sq[k];
      });

  curve.std.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    if (curve.counts[k] < 2) {
      curve.std[k] = 0.0;
      curve.single_sample_std = true;
    } else {
      curve.std[k] = std::sqrt(centred.sum_sq[k] / static_cast<double>(curve.counts[k] - 1));
    }
  }
  return curve;
}

NormBound norm_bound(const TraceSet& set, std::size_t n_max) {
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, "norm bound of an empty trace set");
  const std::size_t len = std::min(n_max, set.max_length());

  struct Sums {
    std::vector<double> a, b;
    std::vector<std::size_t> count;
  };
  const Sums zero{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0),
                  std::vector<std::size_t>(len, 0)};
  auto norm = [](std::span<const float> v) {
    double sq = 0.0;
    for (float x : v) sq += static_cast<double>(x) * x;
    return std::sqrt(sq);
  };
  Sums sums = detail::chunked_reduce(
      set.size(), zero,
      [&](Sums& part, std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
          const auto& pair = set[s];
          for (std::size_t i = 0; i < std::min(len, pair.n()); ++i) {
            part.a[i] += norm(pair.a(i));
            part.b[i] += norm(pair.b(i));
            part.count[i] += 1;
          }
        }
      },
      [](Sums& total, const Sums& part) {
        for (std::size_t i = 0; i < total.a.size(); ++i) {
          total.a[i] += part.a[i];
          total.b[i] += part.b[i];
          total.count[i] += part.count[i];
        }
      });

  NormBound bound;
  for (std::size_t i = 0; i < len; ++i) {
    const double c = static_cast<double>(sums.count[i]);
    bound.m = std::max({bound.m, sums.a[i] / c, sums.b[i] / c});
  }
  return bound;
}

}  // namespace divscale
