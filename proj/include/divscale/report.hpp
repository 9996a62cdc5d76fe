#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "divscale/bound.hpp"
#include "divscale/dependency.hpp"
#include "divscale/divergence.hpp"
#include "divscale/scaling.hpp"

namespace divscale {

// Shortest round-trippable decimal for a double ("%.17g"), so reruns are
// byte-identical.
std::string format_double(double v);

// n,mean,std,count,mode
std::string curve_csv(const DivergenceCurve& curve);
// n,psi_equal_ab,psi_cross_ab,psi_cross_aa,psi_cross_bb,psi_cross_sym,mode
std::string profile_csv(const DependencyProfile& profile);
// kind,bin_lo,bin_hi,count
std::string histogram_csv(const std::array<CosineHistogram, 3>& hist);

struct FitRow {
  std::string benchmark, metric, config;
  ScalingFit fit;
};
// benchmark,metric,config,c,alpha,sse_log,n_points,excluded (excluded is ';'-joined)
std::string fit_csv(const std::vector<FitRow>& rows);

struct DiffRow {
  std::string benchmark, metric;
  ConfigDiff diff;
};
// benchmark,metric,n_l,diff,sign
std::string diff_csv(const std::vector<DiffRow>& rows);

// Throws ParseError for a wrong header or malformed rows; n must run 1..N.
DivergenceCurve parse_curve_csv(const std::string& text);
DependencyProfile parse_profile_csv(const std::string& text);

// Per-n bound analysis over 1..n_max. A negative Upsilon is recorded in the
// record's "error" field instead of aborting. When a curve is given, lambda
// is fitted over the n where Upsilon >= 0 and the overlay lambda sqrt(Upsilon)
// is emitted next to the divergence mean.
nlohmann::json bound_report(const PsiSource& psi, std::size_t n_max, const DivergenceCurve* curve,
                            std::vector<std::string>& errors);

nlohmann::json bound_chain_json(const BoundChainReport& report);

std::string read_text_file(const std::filesystem::path& path);
// Throws IoFailure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace divscale
