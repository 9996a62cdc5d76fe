#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divscale/bound.hpp"
#include "divscale/dependency.hpp"
#include "divscale/divergence.hpp"
#include "divscale/error.hpp"
#include "divscale/report.hpp"
#include "divscale/scaling.hpp"
#include "divscale/scores.hpp"
#include "divscale/synthgen.hpp"
#include "divscale/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace divscale;

namespace {

struct Options {
  std::string input;
  std::string out = "out";
  std::size_t n_max = 0;  // 0: derive from the inputs
  std::string mode = "mean";
  std::string estimator = "norm-of-sum";
  double beta = 1.0;
  double gamma = 1.0;
  std::vector<int> exclude;
  std::optional<std::uint64_t> seed;
  std::size_t bins = kDefaultHistogramBins;
  std::string spec;
  std::string profile;
  std::string divergence;
  std::optional<double> psi_equal, psi_cross_aa, psi_cross_ab;
  std::string benchmark, metric, config, config_a, config_b;
};

// Collected while a command runs and emitted as run_summary.json.
struct Run {
  std::string command;
  json inputs = json::object();
  json flags = json::object();
  json outputs = json::array();
  json errors = json::array();
  json warnings = json::array();

  void error(std::string_view kind, const std::string& message, const std::string& where = "") {
    json e{{"kind", kind}, {"message", message}};
    if (!where.empty()) e["where"] = where;
    errors.push_back(std::move(e));
  }
  void output(const fs::path& path, const std::string& text) {
    write_text_file(path, text);
    outputs.push_back(path.string());
  }
};

std::string read_input(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::InvalidArgument, "--input is required");
  return path;
}

json psi_json(const PsiConstants& p) {
  return {{"psi_equal_ab", p.equal_ab}, {"psi_cross_aa", p.cross_aa}, {"psi_cross_ab", p.cross_ab}};
}

void cmd_simulate(const Options& o, Run& run) {
  SynthSpec spec;
  if (!o.spec.empty()) {
    spec = read_synth_spec(o.spec);
    run.inputs["spec"] = o.spec;
  }
  if (o.seed) spec.seed = *o.seed;
  run.flags["spec"] = json::parse(synth_spec_to_json(spec));
  const TraceSet set = generate(spec);
  const fs::path path = fs::path(o.out) / "trace.btrc";
  write_trace_file(set, path);
  run.outputs.push_back(path.string());
  run.flags["expected_psi"] = psi_json(expected_psi(spec));
}

void cmd_estimate(const Options& o, Run& run) {
  const std::string input = read_input(o.input);
  run.inputs["trace"] = input;
  const TraceSet set = read_trace_file(input);
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, input + " holds no samples");
  const std::size_t requested = o.n_max == 0 ? set.max_length() : o.n_max;
  const auto estimator = parse_estimator_mode(o.estimator);
  const auto mode = parse_dependency_mode(o.mode);
  run.flags["n_max"] = requested;

  const DivergenceCurve curve = divergence_curve(set, requested, estimator);
  if (curve.truncated) {
    run.warnings.push_back("n_max " + std::to_string(requested) + " exceeds the longest sample; curve cut at n = " +
                           std::to_string(curve.n_max));
  }
  for (std::size_t k = 0; k < curve.counts.size(); ++k) {
    if (curve.counts[k] < set.size()) {
      run.warnings.push_back("fewer samples from n = " + std::to_string(k + 1) + " (count column shows attrition)");
      break;
    }
  }
  if (curve.single_sample_std) run.warnings.push_back("some n have a single sample; std reported as 0");

  const DependencyProfile profile = dependency_profile(set, curve.n_max, mode);
  const auto hist = cosine_histograms(set, curve.n_max, o.bins);
  const fs::path out(o.out);
  run.output(out / "profile.csv", profile_csv(profile));
  run.output(out / "divergence.csv", curve_csv(curve));
  run.output(out / "histograms.csv", histogram_csv(hist));
  json frac = json::object();
  for (const auto& h : hist) frac[std::string(to_string(h.kind))] = h.positive_fraction();
  run.flags["positive_fraction"] = frac;
}

void add_scaling(const Options& o, const PsiSource& psi, json& report, Run& run) {
  ScalingParams params{o.beta, o.gamma, psi};
  json scaling{{"beta", o.beta}, {"gamma", o.gamma}, {"c", nullptr}};
  try {
    scaling["c"] = scaling_constant(params);
  } catch (const Error& e) {
    run.error(to_string(e.kind()), e.what(), "scaling constant");
    report["scaling"] = scaling;
    return;
  }
  for (auto& r : report["records"]) {
    const std::size_t n = r["n"].get<std::size_t>();
    if (n < 2) continue;
    try {
      if (psi.is_constant()) {
        r["alpha"] = alpha_constant_psi(params, static_cast<double>(n));
      } else {
        const auto which = psi.at(n).delta() > 0.0 ? AlphaCase::DeltaPositive : AlphaCase::DeltaZero;
        r["alpha"] = alpha_general_psi(params, n, which);
      }
    } catch (const Error& e) {
      r["alpha"] = nullptr;
      run.error(to_string(e.kind()), e.what(), "alpha at n=" + std::to_string(n));
    }
  }
  report["scaling"] = scaling;
}

void cmd_bound(const Options& o, Run& run) {
  const bool have_constants = o.psi_equal || o.psi_cross_aa || o.psi_cross_ab;
  if (have_constants == !o.profile.empty()) {
    throw Error(ErrorKind::InvalidArgument,
                "give either --profile or all of --psi-equal, --psi-cross-aa, --psi-cross-ab");
  }
  std::optional<PsiSource> psi;
  std::size_t n_max = o.n_max;
  if (have_constants) {
    if (!(o.psi_equal && o.psi_cross_aa && o.psi_cross_ab)) {
      throw Error(ErrorKind::InvalidArgument, "constants need --psi-equal, --psi-cross-aa and --psi-cross-ab");
    }
    const auto c = PsiConstants::checked(*o.psi_equal, *o.psi_cross_aa, *o.psi_cross_ab);
    psi.emplace(c);
    run.flags["psi"] = psi_json(c);
  } else {
    run.inputs["profile"] = o.profile;
    const DependencyProfile profile = parse_profile_csv(read_text_file(o.profile));
    psi.emplace(profile);
    if (n_max == 0) n_max = profile.n_max;
  }

  std::optional<DivergenceCurve> curve;
  if (!o.divergence.empty()) {
    run.inputs["divergence"] = o.divergence;
    curve = parse_curve_csv(read_text_file(o.divergence));
    if (n_max == 0 || (have_constants && o.n_max == 0)) n_max = curve->mean.size();
    n_max = std::min(n_max, curve->mean.size());
  }
  if (n_max == 0) throw Error(ErrorKind::InvalidArgument, "--n-max is required with constant measures");
  run.flags["n_max"] = n_max;

  std::vector<std::string> per_n;
  json report = bound_report(*psi, n_max, curve ? &*curve : nullptr, per_n);
  for (const auto& msg : per_n) {
    const auto colon = msg.find(": ");
    const auto kind_end = msg.find(':', colon + 2);
    run.error(msg.substr(colon + 2, kind_end - colon - 2), msg.substr(colon + 2), msg.substr(0, colon));
  }
  add_scaling(o, *psi, report, run);
  run.output(fs::path(o.out) / "bound.json", report.dump(2) + "\n");
  if (!report["lambda"].is_null()) run.flags["lambda"] = report["lambda"];
}

// (benchmark, metric, config) triples in first-seen order, filtered by the
// optional selector flags.
std::vector<std::array<std::string, 3>> selectors(const ScoreTable& table, const Options& o) {
  std::vector<std::array<std::string, 3>> out;
  std::set<std::array<std::string, 3>> seen;
  for (const auto& r : table.rows()) {
    if (!o.benchmark.empty() && r.benchmark != o.benchmark) continue;
    if (!o.metric.empty() && r.metric != o.metric) continue;
    if (!o.config.empty() && r.config != o.config) continue;
    std::array<std::string, 3> key{r.benchmark, r.metric, r.config};
    if (seen.insert(key).second) out.push_back(key);
  }
  return out;
}

void cmd_fit(const Options& o, Run& run) {
  const std::string input = read_input(o.input);
  run.inputs["scores"] = input;
  const ScoreTable table = read_score_csv(input);
  const std::set<int> exclude(o.exclude.begin(), o.exclude.end());
  run.flags["exclude"] = o.exclude;
  std::vector<FitRow> rows;
  const auto keys = selectors(table, o);
  if (keys.empty()) throw Error(ErrorKind::InvalidArgument, "no score rows match the selectors");
  for (const auto& [b, m, c] : keys) {
    try {
      rows.push_back({b, m, c, fit_power_law(table, b, m, c, exclude)});
    } catch (const Error& e) {
      run.error(to_string(e.kind()), e.what(), b + "/" + m + "/" + c);
    }
  }
  run.output(fs::path(o.out) / "fit.csv", fit_csv(rows));
}

void cmd_compare(const Options& o, Run& run) {
  const std::string input = read_input(o.input);
  if (o.config_a.empty() || o.config_b.empty()) {
    throw Error(ErrorKind::InvalidArgument, "--config-a and --config-b are required");
  }
  run.inputs["scores"] = input;
  const ScoreTable table = read_score_csv(input);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : table.rows()) {
    if (!o.benchmark.empty() && r.benchmark != o.benchmark) continue;
    if (!o.metric.empty() && r.metric != o.metric) continue;
    if (seen.insert({r.benchmark, r.metric}).second) pairs.emplace_back(r.benchmark, r.metric);
  }
  std::vector<DiffRow> rows;
  json skipped = json::array();
  for (const auto& [b, m] : pairs) {
    try {
      for (const auto& d : compare_configs(table, b, m, o.config_a, o.config_b)) rows.push_back({b, m, d});
    } catch (const Error& e) {
      run.error(to_string(e.kind()), e.what(), b + "/" + m);
      skipped.push_back(b + "/" + m);
    }
  }
  run.flags["skipped"] = skipped;
  run.output(fs::path(o.out) / "diff.csv", diff_csv(rows));
}

void cmd_report(const Options& o, Run& run) {
  const std::string input = read_input(o.input);
  run.inputs["trace"] = input;
  const TraceSet set = read_trace_file(input);
  if (set.empty()) throw Error(ErrorKind::EmptyPopulation, input + " holds no samples");
  const std::size_t n_max = o.n_max == 0 ? set.max_length() : o.n_max;
  run.flags["n_max"] = n_max;
  const BoundChainReport report = validate_bound_chain(set, n_max);
  const json j = bound_chain_json(report);
  run.output(fs::path(o.out) / "bound_chain.json", j.dump(2) + "\n");
  run.flags["all_ok"] = report.all_ok();
  if (!report.all_ok()) run.warnings.push_back("bound chain failed at one or more n; see bound_chain.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divergence-token analysis: estimation, bounds and scaling fits"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  };
  auto traces = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Trace file")->required();
    sub->add_option("--n-max", o.n_max, "Largest n (default: longest sample)");
  };
  auto scores = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Score CSV")->required();
    sub->add_option("--benchmark", o.benchmark, "Only this benchmark");
    sub->add_option("--metric", o.metric, "Only this metric");
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic trace file");
  common(simulate);
  simulate->add_option("--spec", o.spec, "SynthSpec JSON (defaults when omitted)");
  simulate->add_option("--seed", o.seed, "Override the spec seed");

  auto* estimate = app.add_subcommand("estimate", "Dependency profile, divergence curve and cosine histograms");
  common(estimate);
  traces(estimate);
  estimate->add_option("--mode", o.mode, "Dependency aggregation: sup|mean|raw")
      ->check(CLI::IsMember({"sup", "mean", "raw"}))
      ->capture_default_str();
  estimate->add_option("--estimator", o.estimator, "norm-of-sum|sum-of-norms")
      ->check(CLI::IsMember({"norm-of-sum", "sum-of-norms"}))
      ->capture_default_str();
  estimate->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber)->capture_default_str();

  auto* bound = app.add_subcommand("bound", "Upsilon, regimes, lambda fit and scaling exponent");
  common(bound);
  bound->add_option("--profile", o.profile, "Profile CSV from estimate");
  bound->add_option("--divergence", o.divergence, "Divergence CSV from estimate (enables the lambda fit)");
  bound->add_option("--psi-equal", o.psi_equal, "Constant psi_equal_ab");
  bound->add_option("--psi-cross-aa", o.psi_cross_aa, "Constant intra-branch psi");
  bound->add_option("--psi-cross-ab", o.psi_cross_ab, "Constant psi_cross_ab");
  bound->add_option("--n-max", o.n_max, "Largest n");
  bound->add_option("--beta", o.beta, "Performance exponent (convention)")->capture_default_str();
  bound->add_option("--gamma", o.gamma, "Performance scale (convention)")->capture_default_str();

  auto* fit = app.add_subcommand("fit", "Power-law fits S(n) = c / n^alpha per selector");
  common(fit);
  scores(fit);
  fit->add_option("--config", o.config, "Only this config");
  fit->add_option("--exclude", o.exclude, "n_l values to drop, comma separated")->delimiter(',');

  auto* compare = app.add_subcommand("compare", "Per-n_l score differences between two configs");
  common(compare);
  scores(compare);
  compare->add_option("--config-a", o.config_a, "Minuend config")->required();
  compare->add_option("--config-b", o.config_b, "Subtrahend config")->required();

  auto* report = app.add_subcommand("report", "Check the divergence bound chain on a trace file");
  common(report);
  traces(report);

  CLI11_PARSE(app, argc, argv);

  const auto start = std::chrono::steady_clock::now();
  Run run;
  CLI::App* chosen = app.get_subcommands().front();
  run.command = chosen->get_name();
  for (const auto* opt : chosen->get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    const auto values = opt->results();
    run.flags[opt->get_lnames().front()] = values.size() == 1 ? json(values.front()) : json(values);
  }

  int status = 0;
  try {
    fs::create_directories(o.out);
    if (chosen == simulate) cmd_simulate(o, run);
    else if (chosen == estimate) cmd_estimate(o, run);
    else if (chosen == bound) cmd_bound(o, run);
    else if (chosen == fit) cmd_fit(o, run);
    else if (chosen == compare) cmd_compare(o, run);
    else if (chosen == report) cmd_report(o, run);
  } catch (const Error& e) {
    run.error(to_string(e.kind()), e.what(), "fatal");
    std::cerr << "error: " << e.what() << '\n';
    status = 1;
  } catch (const std::exception& e) {
    run.error("IoFailure", e.what(), "fatal");
    std::cerr << "error: " << e.what() << '\n';
    status = 1;
  }
  for (const auto& w : run.warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';

  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  json summary{{"command", run.command}, {"inputs", run.inputs},     {"flags", run.flags},
               {"outputs", run.outputs}, {"errors", run.errors},     {"warnings", run.warnings},
               {"wall_time_ms", elapsed.count()}};
  const std::string text = summary.dump(2) + "\n";
  std::cout << text;
  try {
    write_text_file(fs::path(o.out) / "run_summary.json", text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    status = 1;
  }
  return status;
}
