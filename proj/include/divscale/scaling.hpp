#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "divscale/bound.hpp"
#include "divscale/scores.hpp"

namespace divscale {

// Connection between performance and divergence: S ∝ E[D]^beta, and
// gamma Upsilon(n)^(beta/2) = c / n^alpha(n).
struct ScalingParams {
  double beta = 1.0;
  double gamma = 1.0;
  PsiSource psi = PsiConstants{};

  // Throws InvalidArgument unless beta > 0 and gamma > 0.
  void validate() const;
};

// gamma (1 - psi_eq(1))^(beta/2). Throws DegenerateConstant when psi_eq(1) >= 1.
double scaling_constant(const ScalingParams& params);

// Constant-psi exponent for n >= 2:
//   delta == 0: -beta/2
//   delta > 0:  (beta/2) log_n((1 + n*) / (n + n*)) - beta/2, n* = balance point.
// Throws InvalidBase for n <= 1, DegenerateRatio for delta < 0,
// NonPositiveLogArgument when 1 + n* <= 0.
double alpha_constant_psi(const ScalingParams& params, double n);

enum class AlphaCase { DeltaZero, DeltaPositive };

// n-dependent exponent using psi(n) and c from psi(1):
//   DeltaZero:     log_n(c/gamma) - beta/2 - (beta/2) log_n(1 - psi_eq(n))
//   DeltaPositive: log_n(c/gamma) - beta/2 - (beta/2)(log_n delta(n) + log_n(n + n*(n)))
double alpha_general_psi(const ScalingParams& params, std::size_t n, AlphaCase which);

// Sets when the balance point is below 1, where the sublinear/linear reading
// of the exponent no longer applies.
bool balance_point_below_one(const PsiConstants& psi);

std::vector<std::pair<double, double>> alpha_curve(const ScalingParams& params,
                                                   const std::vector<double>& ns);

struct ScorePoint {
  double n_l = 0.0;
  double score = 0.0;
};

// Fit of S(n) = c / n^alpha by ordinary least squares on (log n, log S).
struct ScalingFit {
  double c = 0.0;
  double alpha = 0.0;
  std::vector<ScorePoint> points;  // included points
  std::vector<double> excluded;    // n_l values removed before fitting
  double sse_log = 0.0;
};

// Throws InsufficientPoints with fewer than two distinct included n_l,
// NonPositiveScore for a score <= 0, InvalidArgument for n_l < 1 or duplicates.
ScalingFit fit_power_law(const std::vector<ScorePoint>& points, const std::set<int>& exclude = {});
ScalingFit fit_power_law(const ScoreTable& table, const std::string& benchmark, const std::string& metric,
                         const std::string& config, const std::set<int>& exclude = {});

enum class DiffSign { Positive, Negative, Zero };

std::string_view to_string(DiffSign sign) noexcept;

struct ConfigDiff {
  int n_l = 0;
  double diff = 0.0;  // score(config_a) - score(config_b)
  DiffSign sign = DiffSign::Zero;
};

// Common n_l only, ordered by n_l descending. Throws NoCommonPoints.
std::vector<ConfigDiff> compare_configs(const ScoreTable& table, const std::string& benchmark,
                                        const std::string& metric, const std::string& config_a,
                                        const std::string& config_b);

// (x - min) / (max - min). Throws ConstantSeries when max == min.
std::vector<double> minmax_normalize(const std::vector<double>& series);

}  // namespace divscale
