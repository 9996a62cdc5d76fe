#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "divscale/dependency.hpp"
#include "divscale/divergence.hpp"

namespace divscale {

// Dependency measures treated as constants in n. `cross_aa` is the
// symmetrized intra-branch measure.
struct PsiConstants {
  double equal_ab = 0.0;
  double cross_aa = 0.0;
  double cross_ab = 0.0;

  // Throws InvalidArgument unless every measure lies in [0, 1].
  static PsiConstants checked(double equal_ab, double cross_aa, double cross_ab);

  double delta() const noexcept { return cross_aa - cross_ab; }
};

// Either constant dependency measures or per-n arrays (index k is n = k + 1).
class PsiSource {
 public:
  PsiSource(PsiConstants constants);  // NOLINT(google-explicit-constructor)
  // Uses psi_cross_sym as the intra-branch measure.
  explicit PsiSource(const DependencyProfile& profile);
  PsiSource(std::vector<double> equal_ab, std::vector<double> cross_aa, std::vector<double> cross_ab);

  bool is_constant() const noexcept { return constant_; }
  // Largest n covered; unbounded for constants.
  std::optional<std::size_t> n_max() const noexcept;
  // Throws InvalidArgument for n = 0 or n past the profile.
  PsiConstants at(std::size_t n) const;

 private:
  bool constant_;
  std::vector<PsiConstants> values_;
};

// n (1 - psi_eq(n)) + (n^2 - n) (psi_aa(n) - psi_ab(n)).
// Throws NegativeBound when the value is negative beyond rounding (1e-12
// relative to the size of the two terms); rounding-level negatives return 0.
double upsilon(const PsiSource& psi, std::size_t n);
// Same value without the sign check.
double upsilon_unchecked(const PsiConstants& psi, double n) noexcept;

struct Decomposition {
  double linear = 0.0;
  double quadratic = 0.0;
};

// linear = n (1 - psi_eq - psi_aa + psi_ab), quadratic = n^2 (psi_aa - psi_ab).
Decomposition decompose(const PsiConstants& psi, double n) noexcept;

// Ratio of linear to quadratic coefficient; DegenerateRatio unless delta > 0.
double rho(const PsiConstants& psi, double n);

// Length at which the linear and quadratic parts are equal:
// (1 - psi_eq) / delta - 1. DegenerateRatio unless delta > 0.
double balance_point(const PsiConstants& psi);

enum class Regime { Sublinear, Balanced, Linear };

std::string_view to_string(Regime regime) noexcept;

inline constexpr double kBalancedTolerance = 1e-9;

// delta == 0 is always Sublinear; delta < 0 throws DegenerateRatio.
Regime classify_regime(const PsiConstants& psi, double n);

enum class ConstraintKind { QuadraticVanishes, QuadraticPositive, QuadraticNegative };

std::string_view to_string(ConstraintKind kind) noexcept;

struct ConstraintCase {
  ConstraintKind kind = ConstraintKind::QuadraticVanishes;
  // Only for QuadraticNegative: largest n keeping Upsilon(n) >= 0.
  std::optional<double> n_valid_max;
};

ConstraintCase constraint_case(const PsiConstants& psi) noexcept;

// Closed-form least squares: sum mean[n] sqrt(U(n)) / sum U(n) over the curve's
// n range. Throws DegenerateFit when every U(n) is 0, NegativeBound when some
// U(n) < 0, InvalidArgument when the profile does not cover the curve.
double fit_lambda(const DivergenceCurve& curve, const PsiSource& psi);

// sum_n (mean[n] - lambda sqrt(U(n)))^2
double lambda_sse(const DivergenceCurve& curve, const PsiSource& psi, double lambda);

// Inputs of the divergence bound: dependency measures plus the optional
// calibration (lambda) and norm bound used to scale it.
struct BoundModel {
  PsiSource psi;
  std::optional<double> lambda;
  std::optional<NormBound> m;

  // Constraint case of the measures at n (per-n profiles may change case).
  ConstraintCase constraint_at(std::size_t n) const { return constraint_case(psi.at(n)); }
  // lambda * sqrt(Upsilon(n)); requires lambda.
  double predicted_divergence(std::size_t n) const;
};

// Per-n outcome of checking the chain of inequalities that bounds E[D(n)].
struct BoundChainStep {
  std::size_t n = 0;
  std::size_t count = 0;      // samples with length >= n
  double mean_d = 0.0;        // E[D(n)]
  double mean_d_sq = 0.0;     // E[D(n)^2]
  bool jensen_ok = false;     // E[D]^2 <= E[D^2]
  double expansion = 0.0;     // diagonal + cross-term expansion of E[D^2]
  double decomp_rel_err = 0.0;
  bool decomp_ok = false;     // |expansion - E[D^2]| <= 1e-6 relative
  double upsilon_sup = 0.0;   // Upsilon(n) from the sup-clamped profile
  double rhs = 0.0;           // 2 m^2 Upsilon_sup(n)
  double slack = 0.0;         // rhs - E[D^2]
  bool final_ok = false;      // E[D^2] <= rhs
  double upsilon_mean = 0.0;  // Upsilon(n) from the mean-clamped profile (reported only)
  bool final_mean_ok = false;
};

struct BoundChainReport {
  double m = 0.0;
  std::vector<BoundChainStep> steps;

  bool all_ok() const noexcept;
};

inline constexpr double kDecompositionTolerance = 1e-6;

// Throws EmptyPopulation for an empty set.
BoundChainReport validate_bound_chain(const TraceSet& set, std::size_t n_max);

}  // namespace divscale
