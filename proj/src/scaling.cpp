#include "divscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "divscale/error.hpp"

namespace divscale {

void ScalingParams::validate() const {
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
}

double scaling_constant(const ScalingParams& params) {
  params.validate();
  const double eq = params.psi.at(1).equal_ab;
  if (!(eq < 1.0)) throw Error(ErrorKind::DegenerateConstant, "psi_eq(1) = 1 gives c = 0");
  return params.gamma * std::pow(1.0 - eq, params.beta / 2.0);
}

bool balance_point_below_one(const PsiConstants& psi) {
  return psi.delta() > 0.0 && balance_point(psi) < 1.0;
}

double alpha_constant_psi(const ScalingParams& params, double n) {
  params.validate();
  if (!(n > 1.0)) throw Error(ErrorKind::InvalidBase, "alpha(n) needs n > 1");
  const PsiConstants psi = params.psi.at(1);
  const double half = params.beta / 2.0;
  if (psi.delta() == 0.0) return -half;
  if (psi.delta() < 0.0) throw Error(ErrorKind::DegenerateRatio, "alpha(n) requires psi_aa >= psi_ab");
  const double star = balance_point(psi);
  if (!(1.0 + star > 0.0)) throw Error(ErrorKind::NonPositiveLogArgument, "1 + n* <= 0");
  return half * std::log((1.0 + star) / (n + star)) / std::log(n) - half;
}

double alpha_general_psi(const ScalingParams& params, std::size_t n, AlphaCase which) {
  if (n <= 1) throw Error(ErrorKind::InvalidBase, "alpha(n) needs n > 1");
  const double c = scaling_constant(params);
  const PsiConstants psi = params.psi.at(n);
  const double log_n = std::log(static_cast<double>(n));
  const double half = params.beta / 2.0;
  const double one_minus_eq = 1.0 - psi.equal_ab;
  if (!(one_minus_eq > 0.0)) throw Error(ErrorKind::NonPositiveLogArgument, "1 - psi_eq(n) <= 0");
  const double base = std::log(c / params.gamma) / log_n - half;
  if (which == AlphaCase::DeltaZero) return base - half * std::log(one_minus_eq) / log_n;

  const double delta = psi.delta();
  if (!(delta > 0.0)) throw Error(ErrorKind::NonPositiveLogArgument, "delta(n) <= 0");
  const double star = one_minus_eq / delta - 1.0;
  const double shifted = static_cast<double>(n) + star;
  if (!(shifted > 0.0)) throw Error(ErrorKind::NonPositiveLogArgument, "n + n* <= 0");
  return base - half * (std::log(delta) + std::log(shifted)) / log_n;
}

std::vector<std::pair<double, double>> alpha_curve(const ScalingParams& params, const std::vector<double>& ns) {
  std::vector<std::pair<double, double>> out;
  out.reserve(ns.size());
  for (double n : ns) out.emplace_back(n, alpha_constant_psi(params, n));
  return out;
}

ScalingFit fit_power_law(const std::vector<ScorePoint>& points, const std::set<int>& exclude) {
  ScalingFit fit;
  for (const auto& p : points) {
    if (!(p.n_l >= 1.0)) throw Error(ErrorKind::InvalidArgument, "n_l must be >= 1");
    const double rounded = std::round(p.n_l);
    if (rounded == p.n_l && exclude.count(static_cast<int>(rounded)) != 0) {
      fit.excluded.push_back(p.n_l);
      continue;
    }
    if (!(p.score > 0.0)) {
      throw Error(ErrorKind::NonPositiveScore, "score at n_l = " + std::to_string(p.n_l) + " is not positive");
    }
    const bool duplicate = std::any_of(fit.points.begin(), fit.points.end(),
                                       [&](const ScorePoint& q) { return q.n_l == p.n_l; });
    if (duplicate) throw Error(ErrorKind::InvalidArgument, "duplicate n_l " + std::to_string(p.n_l));
    fit.points.push_back(p);
  }
  std::sort(fit.excluded.begin(), fit.excluded.end());
  if (fit.points.size() < 2) {
    throw Error(ErrorKind::InsufficientPoints,
                std::to_string(fit.points.size()) + " point(s) left after exclusions, need 2");
  }

  // Simple linear regression of y = log S on x = log n; slope = -alpha.
  const double count = static_cast<double>(fit.points.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& p : fit.points) {
    mean_x += std::log(p.n_l);
    mean_y += std::log(p.score);
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : fit.points) {
    const double dx = std::log(p.n_l) - mean_x;
    sxx += dx * dx;
    sxy += dx * (std::log(p.score) - mean_y);
  }
  const double slope = sxy / sxx;
  const double log_c = mean_y - slope * mean_x;
  fit.alpha = -slope;
  fit.c = std::exp(log_c);
  for (const auto& p : fit.points) {
    const double r = std::log(p.score) - (log_c - fit.alpha * std::log(p.n_l));
    fit.sse_log += r * r;
  }
  return fit;
}

ScalingFit fit_power_law(const ScoreTable& table, const std::string& benchmark, const std::string& metric,
                         const std::string& config, const std::set<int>& exclude) {
  std::vector<ScorePoint> points;
  for (const auto& r : table.select(benchmark, metric, config)) {
    points.push_back({static_cast<double>(r.n_l), r.score});
  }
  return fit_power_law(points, exclude);
}

std::string_view to_string(DiffSign sign) noexcept {
  switch (sign) {
    case DiffSign::Positive: return "positive";
    case DiffSign::Negative: return "negative";
    case DiffSign::Zero: return "zero";
  }
  return "unknown";
}

std::vector<ConfigDiff> compare_configs(const ScoreTable& table, const std::string& benchmark,
                                        const std::string& metric, const std::string& config_a,
                                        const std::string& config_b) {
  std::map<int, double> b_scores;
  for (const auto& r : table.select(benchmark, metric, config_b)) b_scores[r.n_l] = r.score;
  std::vector<ConfigDiff> out;
  for (const auto& r : table.select(benchmark, metric, config_a)) {
    const auto it = b_scores.find(r.n_l);
    if (it == b_scores.end()) continue;
    ConfigDiff d;
    d.n_l = r.n_l;
    d.diff = r.score - it->second;
    d.sign = d.diff > 0.0 ? DiffSign::Positive : (d.diff < 0.0 ? DiffSign::Negative : DiffSign::Zero);
    out.push_back(d);
  }
  if (out.empty()) {
    throw Error(ErrorKind::NoCommonPoints,
                benchmark + "/" + metric + ": no common n_l between " + config_a + " and " + config_b);
  }
  std::sort(out.begin(), out.end(), [](const ConfigDiff& x, const ConfigDiff& y) { return x.n_l > y.n_l; });
  return out;
}

std::vector<double> minmax_normalize(const std::vector<double>& series) {
  if (series.empty()) throw Error(ErrorKind::ConstantSeries, "empty series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  const double min = *lo;
  const double range = *hi - min;
  if (!(range > 0.0)) throw Error(ErrorKind::ConstantSeries, "max equals min");
  std::vector<double> out;
  out.reserve(series.size());
  for (double x : series) out.push_back((x - min) / range);
  return out;
}

}  // namespace divscale
