#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "likecat/error.hpp"

namespace likecat::csv {

// Minimal reader for the unquoted comma-separated dialect used by all tables.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of stream. Blank lines are skipped.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      split(line, fields);
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }

  void expect_header(std::string_view expected) {
    std::vector<std::string> fields;
    if (!next(fields)) throw Error(ErrorCode::MalformedRow, "missing header, expected '" + std::string(expected) + "'");
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) joined += (i ? "," : "") + fields[i];
    if (joined != expected) {
      throw Error(ErrorCode::MalformedRow,
                  "line " + std::to_string(line_no_) + ": header '" + joined + "', expected '" + std::string(expected) + "'");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  static void split(std::string_view line, std::vector<std::string>& out) {
    out.clear();
    std::size_t start = 0;
    for (;;) {
      auto comma = line.find(',', start);
      out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
};

// Strict full-field parse; returns false on trailing garbage.
inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace likecat::csv
