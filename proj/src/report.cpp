#include "divscale/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "divscale/error.hpp"
#include "divscale/scores.hpp"

namespace divscale {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string curve_csv(const DivergenceCurve& curve) {
  std::string out = "n,mean,std,count,mode\n";
  for (std::size_t k = 0; k < curve.mean.size(); ++k) {
    out += std::to_string(k + 1) + ',' + format_double(curve.mean[k]) + ',' + format_double(curve.std[k]) + ',' +
           std::to_string(curve.counts[k]) + ',' + std::string(to_string(curve.mode)) + '\n';
  }
  return out;
}

std::string profile_csv(const DependencyProfile& p) {
  std::string out = "n,psi_equal_ab,psi_cross_ab,psi_cross_aa,psi_cross_bb,psi_cross_sym,mode\n";
  for (std::size_t k = 0; k < p.n_max; ++k) {
    out += std::to_string(k + 1) + ',' + format_double(p.psi_equal_ab[k]) + ',' + format_double(p.psi_cross_ab[k]) +
           ',' + format_double(p.psi_cross_aa[k]) + ',' + format_double(p.psi_cross_bb[k]) + ',' +
           format_double(p.psi_cross_sym[k]) + ',' + std::string(to_string(p.mode)) + '\n';
  }
  return out;
}

std::string histogram_csv(const std::array<CosineHistogram, 3>& hist) {
  std::string out = "kind,bin_lo,bin_hi,count\n";
  for (const auto& h : hist) {
    for (std::size_t k = 0; k < h.counts.size(); ++k) {
      out += std::string(to_string(h.kind)) + ',' + format_double(h.bin_edges[k]) + ',' +
             format_double(h.bin_edges[k + 1]) + ',' + std::to_string(h.counts[k]) + '\n';
    }
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::string join_excluded(const std::vector<double>& xs) {
  std::string out;
  for (double x : xs) {
    if (!out.empty()) out += ';';
    out += format_double(x);
  }
  return out;
}

}  // namespace

std::string fit_csv(const std::vector<FitRow>& rows) {
  std::string out = "benchmark,metric,config,c,alpha,sse_log,n_points,excluded\n";
  for (const auto& r : rows) {
    out += csv_field(r.benchmark) + ',' + csv_field(r.metric) + ',' + csv_field(r.config) + ',' +
           format_double(r.fit.c) + ',' + format_double(r.fit.alpha) + ',' + format_double(r.fit.sse_log) + ',' +
           std::to_string(r.fit.points.size()) + ',' + join_excluded(r.fit.excluded) + '\n';
  }
  return out;
}

std::string diff_csv(const std::vector<DiffRow>& rows) {
  std::string out = "benchmark,metric,n_l,diff,sign\n";
  for (const auto& r : rows) {
    out += csv_field(r.benchmark) + ',' + csv_field(r.metric) + ',' + std::to_string(r.diff.n_l) + ',' +
           format_double(r.diff.diff) + ',' + std::string(to_string(r.diff.sign)) + '\n';
  }
  return out;
}

namespace {

// Non-empty, non-comment lines split into fields; checks the header.
std::vector<std::vector<std::string>> csv_rows(const std::string& text, const std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (!seen_header) {
      if (fields != header) throw Error(ErrorKind::ParseError, "unexpected CSV header '" + line + "'");
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "expected " + std::to_string(header.size()) + " fields in '" + line + "'");
    }
    rows.push_back(std::move(fields));
  }
  if (!seen_header) throw Error(ErrorKind::ParseError, "missing CSV header");
  if (rows.empty()) throw Error(ErrorKind::ParseError, "no data rows");
  return rows;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw Error(ErrorKind::ParseError, "bad number '" + s + "'");
  }
  return v;
}

std::size_t to_index(const std::string& s) {
  const double v = to_double(s);
  if (v < 0.0 || v != std::floor(v)) throw Error(ErrorKind::ParseError, "bad integer '" + s + "'");
  return static_cast<std::size_t>(v);
}

void check_sequence(std::size_t n, std::size_t expected) {
  if (n != expected) {
    throw Error(ErrorKind::ParseError,
                "rows must list n = 1, 2, ... in order; got n = " + std::to_string(n) + " at row " +
                    std::to_string(expected));
  }
}

}  // namespace

DivergenceCurve parse_curve_csv(const std::string& text) {
  const auto rows = csv_rows(text, {"n", "mean", "std", "count", "mode"});
  DivergenceCurve c;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    check_sequence(to_index(rows[k][0]), k + 1);
    c.mean.push_back(to_double(rows[k][1]));
    c.std.push_back(to_double(rows[k][2]));
    c.counts.push_back(to_index(rows[k][3]));
    try {
      c.mode = parse_estimator_mode(rows[k][4]);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, e.what());
    }
  }
  c.n_max = rows.size();
  return c;
}

DependencyProfile parse_profile_csv(const std::string& text) {
  const auto rows =
      csv_rows(text, {"n", "psi_equal_ab", "psi_cross_ab", "psi_cross_aa", "psi_cross_bb", "psi_cross_sym", "mode"});
  DependencyProfile p;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    check_sequence(to_index(rows[k][0]), k + 1);
    p.psi_equal_ab.push_back(to_double(rows[k][1]));
    p.psi_cross_ab.push_back(to_double(rows[k][2]));
    p.psi_cross_aa.push_back(to_double(rows[k][3]));
    p.psi_cross_bb.push_back(to_double(rows[k][4]));
    p.psi_cross_sym.push_back(to_double(rows[k][5]));
    p.cross_defined.push_back(k > 0);
    try {
      p.mode = parse_dependency_mode(rows[k][6]);
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, e.what());
    }
  }
  p.n_max = rows.size();
  return p;
}

namespace {

nlohmann::json constraint_json(const ConstraintCase& cc) {
  nlohmann::json j{{"kind", std::string(to_string(cc.kind))}};
  j["n_valid_max"] = cc.n_valid_max ? nlohmann::json(*cc.n_valid_max) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

nlohmann::json bound_report(const PsiSource& psi, std::size_t n_max, const DivergenceCurve* curve,
                            std::vector<std::string>& errors) {
  if (n_max == 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  if (curve && curve->mean.size() < n_max) {
    throw Error(ErrorKind::InvalidArgument, "divergence curve covers n <= " + std::to_string(curve->mean.size()) +
                                                ", bound requested up to " + std::to_string(n_max));
  }
  if (psi.n_max() && *psi.n_max() < n_max) {
    throw Error(ErrorKind::InvalidArgument, "dependency profile covers n <= " + std::to_string(*psi.n_max()) +
                                                ", bound requested up to " + std::to_string(n_max));
  }

  nlohmann::json records = nlohmann::json::array();
  std::vector<std::size_t> valid;  // n with Upsilon >= 0
  std::vector<double> ups(n_max, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const PsiConstants c = psi.at(n);
    const double nd = static_cast<double>(n);
    const Decomposition dec = decompose(c, nd);
    nlohmann::json r{{"n", n},
                     {"psi_equal_ab", c.equal_ab},
                     {"psi_cross_aa", c.cross_aa},
                     {"psi_cross_ab", c.cross_ab},
                     {"linear", dec.linear},
                     {"quadratic", dec.quadratic},
                     {"constraint", constraint_json(constraint_case(c))}};
    try {
      ups[n - 1] = upsilon(psi, n);
      r["upsilon"] = ups[n - 1];
      valid.push_back(n);
    } catch (const Error& e) {
      r["upsilon"] = upsilon_unchecked(c, nd);
      r["error"] = e.what();
      errors.push_back("n=" + std::to_string(n) + ": " + e.what());
    }
    if (c.delta() > 0.0) {
      r["rho"] = rho(c, nd);
      r["balance_point"] = balance_point(c);
    } else {
      r["rho"] = nullptr;
      r["balance_point"] = nullptr;
    }
    if (c.delta() >= 0.0) {
      r["regime"] = std::string(to_string(classify_regime(c, nd)));
    } else {
      r["regime"] = nullptr;
    }
    records.push_back(std::move(r));
  }

  const PsiConstants last = psi.at(n_max);
  nlohmann::json out{{"n_max", n_max},
                     {"psi_constant", psi.is_constant()},
                     {"constraint", constraint_json(constraint_case(last))},
                     {"records", nullptr}};
  out["balance_point"] = last.delta() > 0.0 ? nlohmann::json(balance_point(last)) : nlohmann::json(nullptr);

  out["lambda"] = nullptr;
  if (curve) {
    double num = 0.0, den = 0.0;
    for (std::size_t n : valid) {
      num += curve->mean[n - 1] * std::sqrt(ups[n - 1]);
      den += ups[n - 1];
    }
    if (den > 0.0) {
      const double lambda = num / den;
      double sse = 0.0, mean_sum = 0.0;
      for (std::size_t n : valid) {
        const double overlay = lambda * std::sqrt(ups[n - 1]);
        auto& r = records[n - 1];
        r["mean"] = curve->mean[n - 1];
        r["std"] = curve->std[n - 1];
        r["overlay"] = overlay;
        const double resid = curve->mean[n - 1] - overlay;
        sse += resid * resid;
        mean_sum += curve->mean[n - 1];
      }
      const double count = static_cast<double>(valid.size());
      out["lambda"] = lambda;
      out["lambda_sse"] = sse;
      out["overlay_rmse"] = std::sqrt(sse / count);
      out["overlay_rmse_relative"] = mean_sum > 0.0 ? std::sqrt(sse / count) / (mean_sum / count) : 0.0;
    } else {
      errors.push_back(std::string(to_string(ErrorKind::DegenerateFit)) + ": Upsilon(n) is zero over the whole curve");
    }
  }
  out["records"] = std::move(records);
  return out;
}

nlohmann::json bound_chain_json(const BoundChainReport& report) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : report.steps) {
    steps.push_back({{"n", s.n},
                     {"count", s.count},
                     {"mean_d", s.mean_d},
                     {"mean_d_sq", s.mean_d_sq},
                     {"jensen_ok", s.jensen_ok},
                     {"expansion", s.expansion},
                     {"decomp_rel_err", s.decomp_rel_err},
                     {"decomp_ok", s.decomp_ok},
                     {"upsilon_sup", s.upsilon_sup},
                     {"rhs", s.rhs},
                     {"slack", s.slack},
                     {"final_ok", s.final_ok},
                     {"upsilon_mean", s.upsilon_mean},
                     {"final_mean_ok", s.final_mean_ok}});
  }
  return {{"m", report.m}, {"all_ok", report.all_ok()}, {"steps", std::move(steps)}};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace divscale
