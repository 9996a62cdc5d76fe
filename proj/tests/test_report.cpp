#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "divscale/error.hpp"
#include "divscale/report.hpp"
#include "divscale/synthgen.hpp"
#include "helpers.hpp"

using namespace divscale;

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 65.19657610464394, -0.0503}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("curve and profile CSV round trip") {
  const TraceSet set = testing::random_set(4, 30, 6, 5);
  const auto curve = divergence_curve(set, 6, EstimatorMode::SumOfNorms);
  const auto back = parse_curve_csv(curve_csv(curve));
  CHECK(back.mean == curve.mean);
  CHECK(back.std == curve.std);
  CHECK(back.counts == curve.counts);
  CHECK(back.mode == EstimatorMode::SumOfNorms);

  const auto prof = dependency_profile(set, 6, DependencyMode::SupClamped);
  const auto text = profile_csv(prof);
  CHECK(text.rfind("n,psi_equal_ab,psi_cross_ab,psi_cross_aa,psi_cross_bb,psi_cross_sym,mode\n", 0) == 0);
  const auto p2 = parse_profile_csv(text);
  CHECK(p2.psi_equal_ab == prof.psi_equal_ab);
  CHECK(p2.psi_cross_sym == prof.psi_cross_sym);
  CHECK(p2.mode == DependencyMode::SupClamped);
  CHECK(p2.n_max == 6);
}

TEST_CASE("malformed CSV inputs") {
  CHECK_THROWS_AS(parse_curve_csv(""), Error);
  CHECK_THROWS_AS(parse_curve_csv("n,mean,std,count,mode\n"), Error);
  CHECK_THROWS_AS(parse_curve_csv("n,mean,std,count,mode\n2,1,0,1,norm-of-sum\n"), Error);
  CHECK_THROWS_AS(parse_curve_csv("n,mean,std,count,mode\n1,x,0,1,norm-of-sum\n"), Error);
  CHECK_THROWS_AS(parse_curve_csv("n,mean,std,count,mode\n1,1,0,1,bogus\n"), Error);
  CHECK_THROWS_AS(parse_profile_csv("n,mean,std,count,mode\n1,1,0,1,norm-of-sum\n"), Error);
}

TEST_CASE("histogram CSV") {
  const auto hist = cosine_histograms(testing::random_set(1, 5, 3, 4), 3, 4);
  const auto text = histogram_csv(hist);
  CHECK(text.rfind("kind,bin_lo,bin_hi,count\nequal_ab,-1,-0.5,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 4);
}

TEST_CASE("fit and diff CSV") {
  ScalingFit fit;
  fit.c = 2;
  fit.alpha = -0.5;
  fit.points = {{1, 2}, {4, 4}};
  fit.excluded = {384, 512};
  CHECK(fit_csv({{"Real, QA", "Overall", "vqq", fit}}) ==
        "benchmark,metric,config,c,alpha,sse_log,n_points,excluded\n\"Real, QA\",Overall,vqq,2,-0.5,0,2,384;512\n");
  CHECK(diff_csv({{"POPE", "Overall", {768, 1.5, DiffSign::Positive}}}) ==
        "benchmark,metric,n_l,diff,sign\nPOPE,Overall,768,1.5,positive\n");
}

TEST_CASE("bound report with constants") {
  std::vector<std::string> errors;
  const auto j = bound_report(PsiConstants{0.7, 0.9, 0.899}, 5, nullptr, errors);
  CHECK(errors.empty());
  CHECK(j["balance_point"].get<double>() == doctest::Approx(299.0));
  CHECK(j["constraint"]["kind"] == "quadratic_positive");
  CHECK(j["records"].size() == 5);
  CHECK(j["records"][1]["upsilon"].get<double>() == doctest::Approx(0.602));
  CHECK(j["records"][1]["regime"] == "sublinear");
  CHECK(j["lambda"].is_null());
}

TEST_CASE("negative Upsilon is reported per n") {
  std::vector<std::string> errors;
  const auto j = bound_report(PsiConstants{0.7, 0.88, 0.90}, 20, nullptr, errors);
  CHECK(j["constraint"]["n_valid_max"].get<double>() == doctest::Approx(16.0));
  CHECK(errors.size() == 4);  // n = 17..20
  CHECK(j["records"][16].contains("error"));
  CHECK(!j["records"][15].contains("error"));
  CHECK(j["records"][16]["regime"].is_null());
}

TEST_CASE("bound report overlay on a synthetic pipeline") {
  SynthSpec spec;
  spec.samples = 200;
  spec.n = 16;
  const TraceSet set = generate(spec);
  const auto curve = divergence_curve(set, 16);
  const auto prof = dependency_profile(set, 16, DependencyMode::MeanClamped);
  std::vector<std::string> errors;
  const auto j = bound_report(PsiSource(prof), 16, &curve, errors);
  CHECK(errors.empty());
  const double lambda = j["lambda"].get<double>();
  CHECK(lambda == doctest::Approx(fit_lambda(curve, PsiSource(prof))).epsilon(1e-12));
  CHECK(j["overlay_rmse_relative"].get<double>() <= 0.15);
  // within three standard deviations of the mean at every n
  for (const auto& r : j["records"]) {
    CHECK(std::abs(r["mean"].get<double>() - r["overlay"].get<double>()) <= 3.0 * r["std"].get<double>());
  }
  std::vector<std::string> more;
  CHECK_THROWS_AS(bound_report(PsiSource(prof), 17, &curve, more), Error);
}

TEST_CASE("chain JSON") {
  const auto r = validate_bound_chain(testing::random_set(2, 10, 4, 3), 4);
  const auto j = bound_chain_json(r);
  CHECK(j["steps"].size() == r.steps.size());
  CHECK(j["all_ok"].get<bool>() == r.all_ok());
}

TEST_CASE("text file helpers") {
  testing::TempDir dir;
  write_text_file(dir.path / "a.txt", "hello\n");
  CHECK(read_text_file(dir.path / "a.txt") == "hello\n");
  CHECK_THROWS_AS(read_text_file(dir.path / "missing.txt"), Error);
  CHECK_THROWS_AS(write_text_file(dir.path / "no" / "such" / "x.txt", "x"), Error);
}
