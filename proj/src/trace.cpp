#include "divscale/trace.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "divscale/error.hpp"

namespace divscale {

namespace {

bool all_finite(const std::vector<float>& v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string metadata_json(const Metadata& metadata) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : metadata) j[key] = value;
  return j.dump();
}

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + size);
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t count, const char* what) const {
    if (remaining() < count) {
      throw Error(ErrorKind::ShapeMismatch, std::string("truncated trace file while reading ") + what);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return v;
  }
  float f32() {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return std::bit_cast<float>(v);
  }
  std::span<const std::uint8_t> take(std::size_t count, const char* what) {
    need(count, what);
    auto s = bytes_.subspan(pos_, count);
    pos_ += count;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Metadata parse_metadata(std::span<const std::uint8_t> bytes) {
  Metadata metadata;
  if (bytes.empty()) return metadata;
  nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::ParseError, "trace metadata is not a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return metadata;
}

}  // namespace

BranchPairTrace::BranchPairTrace(std::size_t n, std::size_t dim, std::vector<float> branch_a,
                                 std::vector<float> branch_b)
    : n_(n), dim_(dim), a_(std::move(branch_a)), b_(std::move(branch_b)) {
  if (n_ == 0 || dim_ == 0) {
    throw Error(ErrorKind::ShapeMismatch, "branch pair needs n >= 1 and dim >= 1");
  }
  if (a_.size() != n_ * dim_ || b_.size() != n_ * dim_) {
    throw Error(ErrorKind::ShapeMismatch, "branch buffers do not match n x dim = " +
                                              std::to_string(n_) + " x " + std::to_string(dim_));
  }
  if (!all_finite(a_) || !all_finite(b_)) {
    throw Error(ErrorKind::NonFinite, "branch pair contains NaN or Inf");
  }
}

TraceSet::TraceSet(std::size_t dim, Metadata metadata) : dim_(dim), metadata_(std::move(metadata)) {
  if (dim_ == 0) throw Error(ErrorKind::ShapeMismatch, "trace set dim must be positive");
}

void TraceSet::add(BranchPairTrace sample) {
  if (sample.dim() != dim_) {
    throw Error(ErrorKind::ShapeMismatch, "sample dim " + std::to_string(sample.dim()) +
                                              " differs from set dim " + std::to_string(dim_));
  }
  samples_.push_back(std::move(sample));
}

std::size_t TraceSet::max_length() const noexcept {
  std::size_t longest = 0;
  for (const auto& s : samples_) longest = std::max(longest, s.n());
  return longest;
}

std::size_t encoded_trace_size(const TraceSet& set) {
  std::size_t size = kTraceHeaderBytes + metadata_json(set.metadata()).size();
  for (const auto& s : set.samples()) size += 4 + 2 * 4 * s.n() * s.dim();
  return size;
}

std::vector<std::uint8_t> encode_trace(const TraceSet& set) {
  const std::string meta = metadata_json(set.metadata());
  ByteWriter w(encoded_trace_size(set));
  w.raw(kTraceMagic, 4);
  w.u16(kTraceVersion);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(set.dim()));
  w.u32(static_cast<std::uint32_t>(set.size()));
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.raw(meta.data(), meta.size());
  for (const auto& s : set.samples()) {
    w.u32(static_cast<std::uint32_t>(s.n()));
    for (float v : s.branch_a()) w.f32(v);
    for (float v : s.branch_b()) w.f32(v);
  }
  return w.take();
}

TraceSet decode_trace(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kTraceMagic, 4) != 0) {
    throw Error(ErrorKind::BadMagic, "not a trace file (expected BTRC magic)");
  }
  ByteReader r(bytes.subspan(4));
  const std::uint16_t version = r.u16("version");
  if (version != kTraceVersion) {
    throw Error(ErrorKind::VersionUnsupported, "trace version " + std::to_string(version));
  }
  r.u16("flags");
  const std::uint32_t dim = r.u32("dim");
  const std::uint32_t count = r.u32("sample_count");
  const std::uint32_t meta_len = r.u32("metadata_len");
  if (dim == 0) throw Error(ErrorKind::ShapeMismatch, "trace header declares dim 0");

  TraceSet set(dim, parse_metadata(r.take(meta_len, "metadata")));
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::uint32_t n = r.u32("sample length");
    if (n == 0) throw Error(ErrorKind::ShapeMismatch, "sample " + std::to_string(k) + " has n = 0");
    const std::size_t values = static_cast<std::size_t>(n) * dim;
    r.need(values * 8, "sample payload");
    std::vector<float> a(values), b(values);
    for (auto& v : a) v = r.f32();
    for (auto& v : b) v = r.f32();
    set.add(BranchPairTrace(n, dim, std::move(a), std::move(b)));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorKind::ShapeMismatch,
                std::to_string(r.remaining()) + " trailing bytes after declared samples");
  }
  return set;
}

void write_trace_file(const TraceSet& set, const std::filesystem::path& path) {
  const auto bytes = encode_trace(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

TraceSet read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_trace(bytes);
}

}  // namespace divscale
