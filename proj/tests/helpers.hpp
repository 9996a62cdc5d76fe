#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "divscale/trace.hpp"

namespace testing {

// Pair from row-major row lists.
inline divscale::BranchPairTrace make_pair(const std::vector<std::vector<float>>& a,
                                           const std::vector<std::vector<float>>& b) {
  const std::size_t n = a.size();
  const std::size_t dim = a.front().size();
  std::vector<float> fa, fb;
  for (const auto& r : a) fa.insert(fa.end(), r.begin(), r.end());
  for (const auto& r : b) fb.insert(fb.end(), r.begin(), r.end());
  return divscale::BranchPairTrace(n, dim, std::move(fa), std::move(fb));
}

inline divscale::BranchPairTrace random_pair(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> a(n * dim), b(n * dim);
  for (auto& x : a) x = normal(rng);
  for (auto& x : b) x = normal(rng);
  return divscale::BranchPairTrace(n, dim, std::move(a), std::move(b));
}

// Samples of varying length (1..max_n).
inline divscale::TraceSet random_set(std::uint64_t seed, std::size_t samples, std::size_t max_n, std::size_t dim) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(1, max_n);
  divscale::TraceSet set(dim, {{"seed", std::to_string(seed)}});
  for (std::size_t s = 0; s < samples; ++s) set.add(random_pair(rng, len(rng), dim));
  return set;
}

// Removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("divscale_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace testing
