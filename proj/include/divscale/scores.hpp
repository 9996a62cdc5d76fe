#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace divscale {

struct ScoreRecord {
  std::string benchmark;
  std::string metric;
  std::string config;
  int n_l = 0;
  double score = 0.0;
};

// Long-format benchmark scores; (benchmark, metric, config, n_l) is unique.
class ScoreTable {
 public:
  // Throws DuplicateKey if the key already exists, ParseError for n_l < 1 or a
  // non-finite score.
  void add(ScoreRecord record);

  const std::vector<ScoreRecord>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  // Rows matching the selector, in insertion order.
  std::vector<ScoreRecord> select(const std::string& benchmark, const std::string& metric,
                                  const std::string& config) const;

 private:
  std::vector<ScoreRecord> rows_;
};

// Header must be `benchmark,metric,config,n_l,score`. Blank lines and lines
// starting with '#' are ignored; fields may be double-quoted.
ScoreTable parse_score_csv(std::istream& in);
ScoreTable read_score_csv(const std::filesystem::path& path);

// Split one CSV line, honouring double quotes ("" escapes a quote).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace divscale
