#include "divscale/scores.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "divscale/error.hpp"

namespace divscale {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, const char* field) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": bad " + field + " '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

void ScoreTable::add(ScoreRecord record) {
  if (record.n_l < 1) throw Error(ErrorKind::ParseError, "n_l must be a positive integer");
  if (!std::isfinite(record.score)) throw Error(ErrorKind::ParseError, "score must be finite");
  const bool duplicate = std::any_of(rows_.begin(), rows_.end(), [&](const ScoreRecord& r) {
    return r.benchmark == record.benchmark && r.metric == record.metric &&
           r.config == record.config && r.n_l == record.n_l;
  });
  if (duplicate) {
    throw Error(ErrorKind::DuplicateKey, record.benchmark + "," + record.metric + "," +
                                             record.config + "," + std::to_string(record.n_l));
  }
  rows_.push_back(std::move(record));
}

std::vector<ScoreRecord> ScoreTable::select(const std::string& benchmark, const std::string& metric,
                                            const std::string& config) const {
  std::vector<ScoreRecord> out;
  for (const auto& r : rows_) {
    if (r.benchmark == benchmark && r.metric == metric && r.config == config) out.push_back(r);
  }
  return out;
}

ScoreTable parse_score_csv(std::istream& in) {
  static const std::vector<std::string> kHeader = {"benchmark", "metric", "config", "n_l", "score"};
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fields = split_csv_line(body);
    if (!have_header) {
      if (fields != kHeader) {
        throw Error(ErrorKind::ParseError, "expected header benchmark,metric,config,n_l,score");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != kHeader.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 5 fields, got " +
                                             std::to_string(fields.size()));
    }
    ScoreRecord record;
    record.benchmark = fields[0];
    record.metric = fields[1];
    record.config = fields[2];
    record.n_l = parse_number<int>(fields[3], line_no, "n_l");
    record.score = parse_number<double>(fields[4], line_no, "score");
    table.add(std::move(record));
  }
  if (!have_header) throw Error(ErrorKind::ParseError, "missing CSV header");
  return table;
}

ScoreTable read_score_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return parse_score_csv(in);
}

}  // namespace divscale
