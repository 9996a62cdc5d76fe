#include "divscale/bound.hpp"

#include <algorithm>
#include <cmath>

#include "divscale/error.hpp"
#include "parallel.hpp"

namespace divscale {

PsiConstants PsiConstants::checked(double equal_ab, double cross_aa, double cross_ab) {
  for (double v : {equal_ab, cross_aa, cross_ab}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "dependency measures must lie in [0, 1]");
    }
  }
  return {equal_ab, cross_aa, cross_ab};
}

PsiSource::PsiSource(PsiConstants constants) : constant_(true), values_{constants} {}

PsiSource::PsiSource(const DependencyProfile& profile)
    : PsiSource(profile.psi_equal_ab, profile.psi_cross_sym, profile.psi_cross_ab) {}

PsiSource::PsiSource(std::vector<double> equal_ab, std::vector<double> cross_aa,
                     std::vector<double> cross_ab)
    : constant_(false) {
  if (equal_ab.size() != cross_aa.size() || equal_ab.size() != cross_ab.size()) {
    throw Error(ErrorKind::ShapeMismatch, "per-n dependency arrays differ in length");
  }
  values_.reserve(equal_ab.size());
  for (std::size_t k = 0; k < equal_ab.size(); ++k) values_.push_back({equal_ab[k], cross_aa[k], cross_ab[k]});
}

std::optional<std::size_t> PsiSource::n_max() const noexcept {
  if (constant_) return std::nullopt;
  return values_.size();
}

PsiConstants PsiSource::at(std::size_t n) const {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "dependency measures are defined for n >= 1");
  if (constant_) return values_.front();
  if (n > values_.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "n = " + std::to_string(n) + " beyond profile length " + std::to_string(values_.size()));
  }
  return values_[n - 1];
}

double upsilon_unchecked(const PsiConstants& psi, double n) noexcept {
  return n * (1.0 - psi.equal_ab) + (n * n - n) * psi.delta();
}

double upsilon(const PsiSource& psi, std::size_t n) {
  const PsiConstants c = psi.at(n);
  const double nd = static_cast<double>(n);
  const double u = upsilon_unchecked(c, nd);
  // Cancellation can leave an exact zero slightly negative.
  const double scale = nd * std::abs(1.0 - c.equal_ab) + (nd * nd - nd) * std::abs(c.delta());
  if (u < 0.0 && u >= -1e-12 * scale) return 0.0;
  if (u < 0.0) {
    throw Error(ErrorKind::NegativeBound, "Upsilon(" + std::to_string(n) + ") = " + std::to_string(u) + " < 0");
  }
  return u;
}

Decomposition decompose(const PsiConstants& psi, double n) noexcept {
  return {n * (1.0 - psi.equal_ab - psi.cross_aa + psi.cross_ab), n * n * psi.delta()};
}

double rho(const PsiConstants& psi, double n) {
  if (!(psi.delta() > 0.0)) throw Error(ErrorKind::DegenerateRatio, "rho requires psi_aa > psi_ab");
  return (1.0 - psi.equal_ab - psi.cross_aa + psi.cross_ab) / (n * psi.delta());
}

double balance_point(const PsiConstants& psi) {
  if (!(psi.delta() > 0.0)) throw Error(ErrorKind::DegenerateRatio, "balance point requires psi_aa > psi_ab");
  return (1.0 - psi.equal_ab) / psi.delta() - 1.0;
}

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Sublinear: return "sublinear";
    case Regime::Balanced: return "balanced";
    case Regime::Linear: return "linear";
  }
  return "unknown";
}

Regime classify_regime(const PsiConstants& psi, double n) {
  if (psi.delta() == 0.0) return Regime::Sublinear;
  const double star = balance_point(psi);
  if (std::abs(n - star) <= kBalancedTolerance) return Regime::Balanced;
  return n < star ? Regime::Sublinear : Regime::Linear;
}

std::string_view to_string(ConstraintKind kind) noexcept {
  switch (kind) {
    case ConstraintKind::QuadraticVanishes: return "quadratic_vanishes";
    case ConstraintKind::QuadraticPositive: return "quadratic_positive";
    case ConstraintKind::QuadraticNegative: return "quadratic_negative";
  }
  return "unknown";
}

ConstraintCase constraint_case(const PsiConstants& psi) noexcept {
  const double delta = psi.delta();
  if (delta == 0.0) return {ConstraintKind::QuadraticVanishes, std::nullopt};
  if (delta > 0.0) return {ConstraintKind::QuadraticPositive, std::nullopt};
  return {ConstraintKind::QuadraticNegative, 1.0 + (psi.equal_ab - 1.0) / delta};
}

double fit_lambda(const DivergenceCurve& curve, const PsiSource& psi) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < curve.mean.size(); ++k) {
    const double u = upsilon(psi, k + 1);
    num += curve.mean[k] * std::sqrt(u);
    den += u;
  }
  if (!(den > 0.0)) throw Error(ErrorKind::DegenerateFit, "Upsilon(n) is zero over the whole curve");
  return num / den;
}

double lambda_sse(const DivergenceCurve& curve, const PsiSource& psi, double lambda) {
  double sse = 0.0;
  for (std::size_t k = 0; k < curve.mean.size(); ++k) {
    const double r = curve.mean[k] - lambda * std::sqrt(upsilon(psi, k + 1));
    sse += r * r;
  }
  return sse;
}

double BoundModel::predicted_divergence(std::size_t n) const {
  if (!lambda) throw Error(ErrorKind::InvalidArgument, "bound model has no fitted lambda");
  return *lambda * std::sqrt(upsilon(psi, n));
}

bool BoundChainReport::all_ok() const noexcept {
  return std::all_of(steps.begin(), steps.end(),
                     [](const BoundChainStep& s) { return s.jensen_ok && s.decomp_ok && s.final_ok; });
}

BoundChainReport validate_bound_chain(const TraceSet& set, std::size_t n_max) {
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, "bound chain of an empty trace set");
  const std::size_t len = std::min(n_max, set.max_length());
  const std::size_t dim = set.dim();

  // Per-n sums of D, D^2 (from the cumulative difference) and of the
  // dot-product expansion sum_{i,j<=n} (a_i.a_j + b_i.b_j - a_i.b_j - b_i.a_j).
  struct Sums {
    std::vector<double> d, d_sq, expansion;
    std::vector<std::size_t> count;
  };
  const Sums zero{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0),
                  std::vector<double>(len, 0.0), std::vector<std::size_t>(len, 0)};

  Sums sums = detail::chunked_reduce(
      set.size(), zero,
      [&](Sums& part, std::size_t begin, std::size_t end) {
        std::vector<double> cumulative(dim);
        for (std::size_t s = begin; s < end; ++s) {
          const auto& pair = set[s];
          const std::size_t n = std::min(len, pair.n());
          auto dot = [dim](std::span<const float> x, std::span<const float> y) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dim; ++d) acc += static_cast<double>(x[d]) * y[d];
            return acc;
          };
          std::fill(cumulative.begin(), cumulative.end(), 0.0);
          double expansion = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const auto ai = pair.a(i);
            const auto bi = pair.b(i);
            double sq = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
              cumulative[d] += static_cast<double>(ai[d]) - static_cast<double>(bi[d]);
              sq += cumulative[d] * cumulative[d];
            }
            expansion += dot(ai, ai) + dot(bi, bi) - 2.0 * dot(ai, bi);
            for (std::size_t j = 0; j < i; ++j) {
              const auto aj = pair.a(j);
              const auto bj = pair.b(j);
              expansion += 2.0 * (dot(ai, aj) + dot(bi, bj) - dot(ai, bj) - dot(bi, aj));
            }
            part.d[i] += std::sqrt(sq);
            part.d_sq[i] += sq;
            part.expansion[i] += expansion;
            part.count[i] += 1;
          }
        }
      },
      [](Sums& total, const Sums& part) {
        for (std::size_t k = 0; k < total.d.size(); ++k) {
          total.d[k] += part.d[k];
          total.d_sq[k] += part.d_sq[k];
          total.expansion[k] += part.expansion[k];
          total.count[k] += part.count[k];
        }
      });

  const CosineStats stats = cosine_stats(set, len);
  const PsiSource sup(dependency_profile(stats, DependencyMode::SupClamped));
  const PsiSource mean(dependency_profile(stats, DependencyMode::MeanClamped));

  BoundChainReport report;
  report.m = norm_bound(set, len).m;
  const double scale = 2.0 * report.m * report.m;
  for (std::size_t k = 0; k < len; ++k) {
    BoundChainStep step;
    step.n = k + 1;
    step.count = sums.count[k];
    const double c = static_cast<double>(step.count);
    step.mean_d = sums.d[k] / c;
    step.mean_d_sq = sums.d_sq[k] / c;
    step.expansion = sums.expansion[k] / c;
    // Jensen holds exactly in real arithmetic; allow only rounding of the two means.
    step.jensen_ok = step.mean_d * step.mean_d <= step.mean_d_sq * (1.0 + 1e-12);
    const double err = std::abs(step.expansion - step.mean_d_sq);
    step.decomp_rel_err = step.mean_d_sq > 0.0 ? err / step.mean_d_sq : err;
    step.decomp_ok = step.mean_d_sq > 0.0 ? step.decomp_rel_err <= kDecompositionTolerance : err <= 1e-12;
    const double n = static_cast<double>(step.n);
    step.upsilon_sup = upsilon_unchecked(sup.at(step.n), n);
    step.rhs = scale * step.upsilon_sup;
    step.slack = step.rhs - step.mean_d_sq;
    step.final_ok = step.mean_d_sq <= step.rhs;
    step.upsilon_mean = upsilon_unchecked(mean.at(step.n), n);
    step.final_mean_ok = step.mean_d_sq <= scale * step.upsilon_mean;
    report.steps.push_back(step);
  }
  return report;
}

}  // namespace divscale
