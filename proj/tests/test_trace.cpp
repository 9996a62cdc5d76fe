#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "divscale/error.hpp"
#include "divscale/synthgen.hpp"
#include "divscale/trace.hpp"
#include "helpers.hpp"

using namespace divscale;

namespace {

ErrorKind decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_trace(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("decode succeeded");
  return ErrorKind::ParseError;
}

void put_u32(std::vector<std::uint8_t>& bytes, std::size_t at, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) bytes[at + k] = static_cast<std::uint8_t>(v >> (8 * k));
}

}  // namespace

TEST_CASE("pair construction validates shape and finiteness") {
  CHECK_NOTHROW(BranchPairTrace(2, 3, std::vector<float>(6), std::vector<float>(6)));
  CHECK_THROWS_AS(BranchPairTrace(2, 3, std::vector<float>(6), std::vector<float>(5)), Error);
  CHECK_THROWS_AS(BranchPairTrace(0, 3, {}, {}), Error);
  CHECK_THROWS_AS(BranchPairTrace(1, 0, {}, {}), Error);
  std::vector<float> bad(6, 0.0f);
  bad[4] = std::numeric_limits<float>::quiet_NaN();
  try {
    BranchPairTrace(2, 3, std::vector<float>(6), bad);
    FAIL("NaN accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
  }
  bad[4] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(BranchPairTrace(2, 3, bad, std::vector<float>(6)), Error);
}

TEST_CASE("set rejects mixed dimensions") {
  TraceSet set(3);
  set.add(BranchPairTrace(1, 3, std::vector<float>(3), std::vector<float>(3)));
  try {
    set.add(BranchPairTrace(1, 2, std::vector<float>(2), std::vector<float>(2)));
    FAIL("dim mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
  CHECK(set.size() == 1);
  CHECK(set.max_length() == 1);
}

TEST_CASE("smallest legal file") {
  TraceSet set(1);
  set.add(BranchPairTrace(1, 1, {0.0f}, {0.0f}));
  const auto bytes = encode_trace(set);
  REQUIRE(bytes.size() == kTraceHeaderBytes + 2 + 4 + 8);
  CHECK(std::memcmp(bytes.data(), "BTRC", 4) == 0);
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[20] == '{');
  CHECK(bytes[21] == '}');
  // n = 1, then +0.0f for A and B
  CHECK(bytes[22] == 1);
  for (std::size_t k = 26; k < bytes.size(); ++k) CHECK(bytes[k] == 0);
  const TraceSet back = decode_trace(bytes);
  CHECK(back == set);
  CHECK(!std::signbit(back[0].a(0)[0]));
}

TEST_CASE("write then read is the identity") {
  testing::TempDir dir;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TraceSet set = testing::random_set(seed, 1 + seed % 4, 6, 1 + seed % 5);
    set.metadata()["model"] = "m\"quoted\" é";
    const auto path = dir.path / ("t" + std::to_string(seed) + ".btrc");
    write_trace_file(set, path);
    CHECK(read_trace_file(path) == set);
    CHECK(std::filesystem::file_size(path) == encoded_trace_size(set));
  }
}

TEST_CASE("three samples of dim 8 round trip") {
  testing::TempDir dir;
  const TraceSet set = testing::random_set(7, 3, 5, 8);
  write_trace_file(set, dir.path / "x.btrc");
  const TraceSet back = read_trace_file(dir.path / "x.btrc");
  CHECK(back.size() == 3);
  CHECK(back.dim() == 8);
  CHECK(back == set);
}

TEST_CASE("file size follows the layout") {
  SynthSpec spec;
  spec.samples = 100;
  const TraceSet set = generate(spec);
  const auto bytes = encode_trace(set);
  const std::uint32_t meta_len = bytes[16] | bytes[17] << 8 | bytes[18] << 16 | bytes[19] << 24;
  CHECK(bytes.size() == 20 + meta_len + 100 * (4 + 8 * 32 * 512));
  CHECK(encoded_trace_size(set) == bytes.size());
}

TEST_CASE("reader errors") {
  TraceSet set(2);
  set.add(BranchPairTrace(2, 2, {1, 2, 3, 4}, {5, 6, 7, 8}));
  const auto good = encode_trace(set);

  auto bytes = good;
  bytes[0] = 'X';
  CHECK(decode_error(bytes) == ErrorKind::BadMagic);

  bytes = good;
  bytes[4] = 2;
  CHECK(decode_error(bytes) == ErrorKind::VersionUnsupported);

  bytes = good;
  bytes.pop_back();
  CHECK(decode_error(bytes) == ErrorKind::ShapeMismatch);

  bytes = good;
  bytes.push_back(0);
  CHECK(decode_error(bytes) == ErrorKind::ShapeMismatch);

  bytes = std::vector<std::uint8_t>(good.begin(), good.begin() + 10);
  CHECK(decode_error(bytes) == ErrorKind::ShapeMismatch);

  bytes = good;
  put_u32(bytes, 8, 0);  // dim 0
  CHECK(decode_error(bytes) == ErrorKind::ShapeMismatch);

  bytes = good;
  put_u32(bytes, 22, 0);  // n 0
  CHECK(decode_error(bytes) == ErrorKind::ShapeMismatch);

  bytes = good;
  bytes[20] = '[';
  bytes[21] = ']';
  CHECK(decode_error(bytes) == ErrorKind::ParseError);

  bytes = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&bytes[26], &nan, 4);
  CHECK(decode_error(bytes) == ErrorKind::NonFinite);
}

TEST_CASE("missing file is an io failure") {
  try {
    read_trace_file("/nonexistent/dir/none.btrc");
    FAIL("read succeeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoFailure);
  }
}

TEST_CASE("empty set round trips") {
  TraceSet set(4, {{"k", "v"}});
  CHECK(decode_trace(encode_trace(set)) == set);
}
