#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "divscale/error.hpp"
#include "divscale/scores.hpp"

using namespace divscale;

namespace {

ErrorKind parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_score_csv(in);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("parse succeeded");
  return ErrorKind::IoFailure;
}

ScoreTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_score_csv(in);
}

}  // namespace

TEST_CASE("single row") {
  const auto t = parse("benchmark,metric,config,n_l,score\nPOPE,Overall,vqq,768,86.977\n");
  REQUIRE(t.size() == 1);
  CHECK(t.rows()[0].benchmark == "POPE");
  CHECK(t.rows()[0].n_l == 768);
  CHECK(t.rows()[0].score == 86.977);
}

TEST_CASE("empty body gives an empty table") {
  CHECK(parse("benchmark,metric,config,n_l,score\n").empty());
  CHECK(parse("# comment\n\nbenchmark,metric,config,n_l,score\r\n\n").empty());
}

TEST_CASE("duplicate key") {
  CHECK(parse_error("benchmark,metric,config,n_l,score\nA,m,c,1,2\nA,m,c,1,3\n") == ErrorKind::DuplicateKey);
}

TEST_CASE("malformed input") {
  CHECK(parse_error("") == ErrorKind::ParseError);
  CHECK(parse_error("bench,metric,config,n_l,score\n") == ErrorKind::ParseError);
  const std::string h = "benchmark,metric,config,n_l,score\n";
  CHECK(parse_error(h + "A,m,c,1\n") == ErrorKind::ParseError);
  CHECK(parse_error(h + "A,m,c,x,2\n") == ErrorKind::ParseError);
  CHECK(parse_error(h + "A,m,c,0,2\n") == ErrorKind::ParseError);
  CHECK(parse_error(h + "A,m,c,1,nan\n") == ErrorKind::ParseError);
  CHECK(parse_error(h + "A,m,c,1,2.5x\n") == ErrorKind::ParseError);
}

TEST_CASE("quoted fields and BOM") {
  const auto t = parse("\xEF\xBB\xBF" "benchmark,metric,config,n_l,score\n\"COCO, VAL\",\"BLEU \"\"1\"\"\",vq,8,1.5\n");
  REQUIRE(t.size() == 1);
  CHECK(t.rows()[0].benchmark == "COCO, VAL");
  CHECK(t.rows()[0].metric == "BLEU \"1\"");
}

TEST_CASE("select keeps insertion order") {
  const auto t = parse("benchmark,metric,config,n_l,score\nA,m,c,8,1\nA,m,d,8,2\nA,m,c,1,3\nB,m,c,1,4\n");
  const auto rows = t.select("A", "m", "c");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n_l == 8);
  CHECK(rows[1].n_l == 1);
}

TEST_CASE("bundled fixture loads") {
  const auto t = read_score_csv(std::string(DIVSCALE_DATA_DIR) + "/scores.csv");
  CHECK(t.size() == 780);
  CHECK(t.select("POPE", "Overall", "vqq").size() == 10);
  CHECK(t.select("MME", "Overall", "vq-ft").size() == 10);
}

TEST_CASE("split_csv_line") {
  CHECK(split_csv_line("a,,b") == std::vector<std::string>{"a", "", "b"});
  CHECK(split_csv_line("\"a,b\",c") == std::vector<std::string>{"a,b", "c"});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
}
