#pragma once

#include <cstdio>
#include <string>
#include <variant>
#include <vector>

namespace kdvlab {

/// RFC-4180 CSV assembly with fixed %.17g float formatting, so that reruns of
/// the same computation are byte-identical.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, std::string>;

  explicit CsvWriter(const std::vector<std::string>& header) { row_of_strings(header); }

  void row(const std::vector<Cell>& cells) {
    std::vector<std::string> out;
    out.reserve(cells.size());
    for (const Cell& c : cells) {
      if (std::holds_alternative<double>(c)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(c));
        out.emplace_back(buf);
      } else if (std::holds_alternative<long>(c)) {
        out.push_back(std::to_string(std::get<long>(c)));
      } else {
        out.push_back(std::get<std::string>(c));
      }
    }
    row_of_strings(out);
  }

  const std::string& str() const { return body_; }

 private:
  void row_of_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += quote(cells[i]);
    }
    body_ += "\r\n";
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    q += '"';
    return q;
  }

  std::string body_;
};

}  // namespace kdvlab
