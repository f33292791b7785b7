#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wildwarn::csv {

/// Splits one RFC 4180 style record. Fields may be double-quoted; `""` inside
/// quotes is a literal quote. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_row(std::string_view line);

/// Quotes a field when it contains a comma, quote, or leading/trailing space.
std::string escape(std::string_view field);

std::string_view trim(std::string_view s);

/// Shortest text that parses back to exactly `v`; plain decimals except for
/// very small or very large magnitudes.
std::string format_double(double v);

/// Strict decimal parse (`.` separator, no trailing junk).
std::optional<double> parse_double(std::string_view s);

/// Line reader that tracks 1-based physical line numbers, strips `\r` and a
/// leading UTF-8 BOM, and skips blank lines.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace wildwarn::csv
