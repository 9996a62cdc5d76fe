#pragma once

#include <cstdint>
#include <string>

#include "divscale/bound.hpp"
#include "divscale/trace.hpp"

namespace divscale {

// Synthetic branch pairs with analytic dependency structure:
//   h_i^X = sqrt(r_shared) g + sqrt(r_pos) p_i + sqrt(r_branch) b_X + sqrt(r_noise) e_{i,X}
// Every component is standard normal scaled to unit expected squared norm.
struct SynthSpec {
  std::uint32_t dim = 512;
  std::uint32_t n = 32;
  std::uint32_t samples = 500;
  double r_shared = 0.5;
  double r_pos = 0.2;
  double r_branch = 0.1;
  double r_noise = 0.2;
  std::uint64_t seed = 0;

  // Throws InvalidArgument for zero sizes, negative weights, or weights not
  // summing to 1 within 1e-12.
  void validate() const;
};

inline constexpr double kWeightSumTolerance = 1e-12;

// Sample k uses its own generator seeded from (seed, k); output does not
// depend on thread scheduling.
TraceSet generate(const SynthSpec& spec);

// (r_shared + r_pos, r_shared + r_branch, r_shared) for (psi_eq, psi_aa, psi_ab).
PsiConstants expected_psi(const SynthSpec& spec);

// JSON object with the SynthSpec field names; missing fields keep defaults.
// Throws ParseError for malformed JSON or wrong field types.
SynthSpec synth_spec_from_json(const std::string& text);
SynthSpec read_synth_spec(const std::string& path);
std::string synth_spec_to_json(const SynthSpec& spec);

}  // namespace divscale
