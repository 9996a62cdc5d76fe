#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace divscale {

// Hidden states of one shared-prefix sample after the branch point.
//
// Row i (0-based) holds the hidden state at the (i+1)-th post-branch position,
// so row 0 is h_1. Both branches are stored position-major as n x dim floats.
class BranchPairTrace {
 public:
  // Throws ShapeMismatch when the buffers do not both hold n*dim values or when
  // n or dim is zero, NonFinite when any value is NaN/Inf.
  BranchPairTrace(std::size_t n, std::size_t dim, std::vector<float> branch_a,
                  std::vector<float> branch_b);

  std::size_t n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const float> a(std::size_t i) const { return {a_.data() + i * dim_, dim_}; }
  std::span<const float> b(std::size_t i) const { return {b_.data() + i * dim_, dim_}; }

  const std::vector<float>& branch_a() const noexcept { return a_; }
  const std::vector<float>& branch_b() const noexcept { return b_; }

  friend bool operator==(const BranchPairTrace&, const BranchPairTrace&) = default;

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<float> a_;
  std::vector<float> b_;
};

using Metadata = std::map<std::string, std::string>;

// A population of branch pairs sharing one hidden dimension.
class TraceSet {
 public:
  explicit TraceSet(std::size_t dim, Metadata metadata = {});

  // Throws ShapeMismatch if the sample's dim differs from the set's.
  void add(BranchPairTrace sample);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const std::vector<BranchPairTrace>& samples() const noexcept { return samples_; }
  const BranchPairTrace& operator[](std::size_t i) const { return samples_[i]; }
  const Metadata& metadata() const noexcept { return metadata_; }
  Metadata& metadata() noexcept { return metadata_; }

  // Length of the longest sample, 0 for an empty set.
  std::size_t max_length() const noexcept;

  friend bool operator==(const TraceSet&, const TraceSet&) = default;

 private:
  std::size_t dim_;
  std::vector<BranchPairTrace> samples_;
  Metadata metadata_;
};

// Binary trace container, little-endian:
//   "BTRC" | u16 version | u16 flags | u32 dim | u32 sample_count |
//   u32 metadata_len | metadata (UTF-8 JSON object) |
//   per sample: u32 n | n*dim f32 (branch A) | n*dim f32 (branch B)
inline constexpr char kTraceMagic[4] = {'B', 'T', 'R', 'C'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderBytes = 20;

std::vector<std::uint8_t> encode_trace(const TraceSet& set);
TraceSet decode_trace(std::span<const std::uint8_t> bytes);

void write_trace_file(const TraceSet& set, const std::filesystem::path& path);
TraceSet read_trace_file(const std::filesystem::path& path);

// Exact size in bytes of the encoded container for `set`.
std::size_t encoded_trace_size(const TraceSet& set);

}  // namespace divscale
