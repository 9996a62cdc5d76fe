#include "divscale/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "divscale/error.hpp"

namespace divscale {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

BranchPairTrace generate_sample(const SynthSpec& spec, std::uint64_t index) {
  std::mt19937_64 rng(sample_seed(spec.seed, index));
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t dim = spec.dim;
  const std::size_t n = spec.n;
  const double unit = 1.0 / std::sqrt(static_cast<double>(dim));

  auto draw = [&](std::vector<double>& v) {
    v.resize(dim);
    for (auto& x : v) x = normal(rng) * unit;
  };

  // Draw order is fixed: g, b_A, b_B, then per position p_i, e_iA, e_iB.
  std::vector<double> g, ba, bb, p, ea, eb;
  draw(g);
  draw(ba);
  draw(bb);
  const double ws = std::sqrt(spec.r_shared), wp = std::sqrt(spec.r_pos);
  const double wb = std::sqrt(spec.r_branch), we = std::sqrt(spec.r_noise);

  std::vector<float> a(n * dim), b(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    draw(p);
    draw(ea);
    draw(eb);
    for (std::size_t d = 0; d < dim; ++d) {
      const double common = ws * g[d] + wp * p[d];
      a[i * dim + d] = static_cast<float>(common + wb * ba[d] + we * ea[d]);
      b[i * dim + d] = static_cast<float>(common + wb * bb[d] + we * eb[d]);
    }
  }
  return BranchPairTrace(n, dim, std::move(a), std::move(b));
}

}  // namespace

void SynthSpec::validate() const {
  if (dim == 0 || n == 0 || samples == 0) {
    throw Error(ErrorKind::InvalidArgument, "dim, n and samples must be positive");
  }
  for (double w : {r_shared, r_pos, r_branch, r_noise}) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be >= 0");
  }
  const double sum = r_shared + r_pos + r_branch + r_noise;
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights must sum to 1 (r_shared + r_pos + r_branch + r_noise = " << sum << ")";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

TraceSet generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<std::optional<BranchPairTrace>> out(spec.samples);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), spec.samples));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < spec.samples; s += workers) out[s].emplace(generate_sample(spec, s));
      });
    }
  }
  Metadata meta{{"generator", "synthgen"}, {"spec", synth_spec_to_json(spec)}};
  TraceSet set(spec.dim, std::move(meta));
  for (auto& s : out) set.add(std::move(*s));
  return set;
}

PsiConstants expected_psi(const SynthSpec& spec) {
  return {spec.r_shared + spec.r_pos, spec.r_shared + spec.r_branch, spec.r_shared};
}

SynthSpec synth_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("synth spec: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "synth spec must be a JSON object");
  SynthSpec spec;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("dim", spec.dim);
    get("n", spec.n);
    get("samples", spec.samples);
    get("r_shared", spec.r_shared);
    get("r_pos", spec.r_pos);
    get("r_branch", spec.r_branch);
    get("r_noise", spec.r_noise);
    get("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("synth spec: ") + e.what());
  }
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> known{"dim", "n", "samples", "r_shared", "r_pos", "r_branch", "r_noise", "seed"};
    if (!known.count(key)) throw Error(ErrorKind::ParseError, "synth spec: unknown field '" + key + "'");
  }
  return spec;
}

SynthSpec read_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return synth_spec_from_json(buf.str());
}

std::string synth_spec_to_json(const SynthSpec& spec) {
  nlohmann::json j{{"dim", spec.dim},       {"n", spec.n},           {"samples", spec.samples},
                   {"r_shared", spec.r_shared}, {"r_pos", spec.r_pos}, {"r_branch", spec.r_branch},
                   {"r_noise", spec.r_noise}, {"seed", spec.seed}};
  return j.dump();
}

}  // namespace divscale
