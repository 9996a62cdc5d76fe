#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "divscale/dependency.hpp"
#include "divscale/error.hpp"
#include "divscale/synthgen.hpp"
#include "helpers.hpp"

using namespace divscale;
using testing::make_pair;

namespace {

TraceSet transform(const TraceSet& set, const std::vector<double>& q) {
  const std::size_t dim = set.dim();
  TraceSet out(dim);
  for (const auto& p : set.samples()) {
    std::vector<float> a(p.n() * dim), b(p.n() * dim);
    for (std::size_t i = 0; i < p.n(); ++i) {
      for (std::size_t r = 0; r < dim; ++r) {
        double sa = 0, sb = 0;
        for (std::size_t c = 0; c < dim; ++c) {
          sa += q[r * dim + c] * p.a(i)[c];
          sb += q[r * dim + c] * p.b(i)[c];
        }
        a[i * dim + r] = static_cast<float>(sa);
        b[i * dim + r] = static_cast<float>(sb);
      }
    }
    out.add(BranchPairTrace(p.n(), dim, a, b));
  }
  return out;
}

// Rotation by theta in the (0, 1) plane.
std::vector<double> plane_rotation(std::size_t dim, double theta) {
  std::vector<double> q(dim * dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) q[k * dim + k] = 1.0;
  q[0] = std::cos(theta);
  q[1] = -std::sin(theta);
  q[dim] = std::sin(theta);
  q[dim + 1] = std::cos(theta);
  return q;
}

}  // namespace

TEST_CASE("identical vectors give unit cosines") {
  TraceSet set(3);
  set.add(make_pair({{1, 2, 3}, {2, 4, 6}}, {{1, 2, 3}, {3, 6, 9}}));
  const auto stats = cosine_stats(set, 2);
  CHECK(stats.equal_ab(0) == doctest::Approx(1.0));
  CHECK(stats.cross_ab(0, 1) == doctest::Approx(1.0));
  CHECK(stats.cross_ab(1, 0) == doctest::Approx(1.0));
  CHECK(stats.cross_aa(0, 1) == doctest::Approx(1.0));
  CHECK(stats.cross_bb(0, 1) == doctest::Approx(1.0));
  const auto hist = cosine_histograms(set, 2, 10);
  for (const auto& h : hist) {
    CHECK(h.counts.back() == h.total());
    CHECK(h.positive_fraction() == 1.0);
  }
}

TEST_CASE("orthogonal branches") {
  TraceSet set(4);
  set.add(make_pair({{1, 0, 0, 0}, {1, 1, 0, 0}}, {{0, 0, 1, 0}, {0, 0, 0, 1}}));
  const auto stats = cosine_stats(set, 2);
  CHECK(stats.equal_ab(0) == 0.0);
  CHECK(stats.equal_ab(1) == 0.0);
  CHECK(stats.cross_ab(0, 1) == 0.0);
  CHECK(stats.cross_aa(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(stats.cross_bb(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("negative cosines clamp to zero") {
  TraceSet set(1);
  set.add(make_pair({{1}, {-1}, {1}}, {{-1}, {1}, {-1}}));
  const auto stats = cosine_stats(set, 3);
  for (auto mode : {DependencyMode::SupClamped, DependencyMode::MeanClamped}) {
    const auto p = dependency_profile(stats, mode);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(p.psi_equal_ab[k] == 0.0);
      CHECK(p.psi_cross_ab[k] >= 0.0);
    }
  }
  const auto raw = dependency_profile(stats, DependencyMode::MeanRaw);
  CHECK(raw.psi_equal_ab[2] == doctest::Approx(-1.0));
  CHECK(raw.psi_cross_aa[1] == doctest::Approx(-1.0));
  // pairs (0,1), (0,2), (1,2) intra-branch: -1, 1, -1
  CHECK(raw.psi_cross_aa[2] == doctest::Approx(-1.0 / 3.0));
}

TEST_CASE("n_max = 1 flags cross measures") {
  const TraceSet set = testing::random_set(2, 5, 3, 4);
  const auto p = dependency_profile(set, 1, DependencyMode::MeanClamped);
  CHECK(p.n_max == 1);
  CHECK(!p.cross_defined[0]);
  CHECK(p.psi_cross_ab[0] == 0.0);
  CHECK(p.psi_cross_sym[0] == 0.0);
  CHECK(p.psi_equal_ab[0] >= 0.0);
}

TEST_CASE("zero vectors and empty sets are rejected") {
  TraceSet set(2);
  set.add(make_pair({{0, 0}}, {{1, 0}}));
  try {
    cosine_stats(set, 1);
    FAIL("zero vector accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroVector);
  }
  CHECK_THROWS_AS(cosine_stats(TraceSet(2), 1), Error);
  CHECK_THROWS_AS(cosine_histograms(testing::random_set(1, 2, 2, 2), 2, 0), Error);
}

TEST_CASE("profile invariants on random sets") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TraceSet set = testing::random_set(seed, 30, 10, 5);
    const auto stats = cosine_stats(set, 10);
    const auto sup = dependency_profile(stats, DependencyMode::SupClamped);
    const auto mean = dependency_profile(stats, DependencyMode::MeanClamped);
    const auto raw = dependency_profile(stats, DependencyMode::MeanRaw);
    for (std::size_t k = 0; k < 10; ++k) {
      for (const auto* p : {&sup, &mean}) {
        for (double v : {p->psi_equal_ab[k], p->psi_cross_ab[k], p->psi_cross_aa[k], p->psi_cross_bb[k]}) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
        CHECK(p->psi_cross_sym[k] == (p->psi_cross_aa[k] + p->psi_cross_bb[k]) / 2.0);
      }
      for (double v : {raw.psi_equal_ab[k], raw.psi_cross_ab[k], raw.psi_cross_aa[k]}) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      }
      CHECK(sup.psi_equal_ab[k] >= mean.psi_equal_ab[k]);
      CHECK(sup.psi_cross_ab[k] >= mean.psi_cross_ab[k]);
      CHECK(sup.psi_cross_aa[k] >= mean.psi_cross_aa[k]);
      CHECK(sup.psi_cross_bb[k] >= mean.psi_cross_bb[k]);
      if (k > 0) {
        CHECK(sup.psi_equal_ab[k] >= sup.psi_equal_ab[k - 1]);
        CHECK(sup.psi_cross_ab[k] >= sup.psi_cross_ab[k - 1]);
        CHECK(sup.psi_cross_aa[k] >= sup.psi_cross_aa[k - 1]);
      }
    }
  }
}

TEST_CASE("rotation and per-vector scale invariance") {
  const TraceSet set = testing::random_set(11, 20, 6, 5);
  const TraceSet rotated = transform(set, plane_rotation(5, 0.7));
  const auto s0 = cosine_stats(set, 6);
  const auto s1 = cosine_stats(rotated, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(s1.equal_ab(i) == doctest::Approx(s0.equal_ab(i)).epsilon(1e-6));
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(s1.cross_ab(i, j) == doctest::Approx(s0.cross_ab(i, j)).epsilon(1e-6));
      CHECK(s1.cross_aa(i, j) == doctest::Approx(s0.cross_aa(i, j)).epsilon(1e-6));
    }
  }

  // Scale one hidden state: its cosines do not move.
  TraceSet scaled(set.dim());
  for (std::size_t s = 0; s < set.size(); ++s) {
    auto a = set[s].branch_a();
    if (s == 0) {
      for (std::size_t d = 0; d < set.dim(); ++d) a[d] *= 7.0f;
    }
    scaled.add(BranchPairTrace(set[s].n(), set.dim(), a, set[s].branch_b()));
  }
  const auto s2 = cosine_stats(scaled, 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(s2.equal_ab(i) == doctest::Approx(s0.equal_ab(i)).epsilon(1e-6));
    for (std::size_t j = 0; j < 6; ++j) CHECK(s2.cross_aa(i, j) == doctest::Approx(s0.cross_aa(i, j)).epsilon(1e-6));
  }
}

TEST_CASE("synthetic oracle") {
  SynthSpec spec;
  const TraceSet set = generate(spec);
  const auto stats = cosine_stats(set, 32);
  CHECK(stats.equal_ab(5) == doctest::Approx(0.7).epsilon(0.03 / 0.7));
  CHECK(stats.cross_aa(2, 9) == doctest::Approx(0.6).epsilon(0.03 / 0.6));
  CHECK(stats.cross_ab(2, 9) == doctest::Approx(0.5).epsilon(0.03 / 0.5));
  const auto p = dependency_profile(stats, DependencyMode::MeanClamped);
  for (std::size_t k = 1; k < 32; ++k) {
    CHECK(std::abs(p.psi_equal_ab[k] - 0.7) <= 0.03);
    CHECK(std::abs(p.psi_cross_sym[k] - 0.6) <= 0.03);
    CHECK(std::abs(p.psi_cross_ab[k] - 0.5) <= 0.03);
    CHECK(p.psi_cross_aa[k] >= p.psi_cross_ab[k] + spec.r_branch / 2.0);
  }
  const auto hist = cosine_histograms(set, 32);
  for (const auto& h : hist) {
    CHECK(h.positive_fraction() > 0.95);
    CHECK(h.counts.size() == kDefaultHistogramBins);
  }
  CHECK(hist[0].total() == 500 * 32);
  CHECK(hist[1].total() == 500 * 32 * 31);
  CHECK(hist[2].total() == 500 * 32 * 31 / 2);
}

TEST_CASE("uniform cosines give a roughly flat histogram") {
  // cos((1, 0), (c, sqrt(1 - c^2))) = c, so uniform c should fill bins evenly.
  TraceSet set(2);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 4000; ++s) {
    const double c = u(rng);
    const double sn = std::sqrt(1.0 - c * c);
    set.add(make_pair({{1, 0}}, {{static_cast<float>(c), static_cast<float>(sn)}}));
  }
  const auto hist = cosine_histograms(set, 1, 10);
  double chi2 = 0.0;
  for (auto c : hist[0].counts) chi2 += (c - 400.0) * (c - 400.0) / 400.0;
  CHECK(chi2 < 30.0);  // 9 dof, p ~ 4e-4
}

TEST_CASE("mode names") {
  CHECK(parse_dependency_mode("sup") == DependencyMode::SupClamped);
  CHECK(parse_dependency_mode("mean") == DependencyMode::MeanClamped);
  CHECK(parse_dependency_mode("raw") == DependencyMode::MeanRaw);
  CHECK_THROWS_AS(parse_dependency_mode("max"), Error);
  CHECK(to_string(HistogramKind::CrossAABBavg) == "cross_aabb_avg");
}
