#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace synthpass::csv {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Row {
  std::size_t line = 0;  // 1-based source line
  std::vector<std::string> fields;
};

/// Splits one record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_record(std::string_view line, std::size_t line_no);

/// Reads all non-blank records. Lines are numbered from 1.
std::vector<Row> read_rows(std::istream& in);
std::vector<Row> read_file(const std::filesystem::path& path);

std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace synthpass::csv
