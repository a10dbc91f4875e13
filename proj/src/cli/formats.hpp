#pragma once

// Text formats shared by the command-line tool.
//
// Static input: the first line holds n, followed by n whitespace-separated
// values, then one query `L R [p]` per line until EOF.
// Op-stream input: `I <after-id|0> <value>`, `D <id>`, `Q <id> <id> [p]`, one
// per line. Ids are assigned 1, 2, ... to successful inserts.
// Blank lines and lines starting with '#' are ignored in both formats.

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rangesel::cli {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class InputFormat { static_array, op_stream };

/// Line-at-a-time reader that never reads past the current newline.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-blank, non-comment line; false at EOF.
  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> split_tokens(std::string_view line);

bool parse_int(std::string_view tok, std::int64_t& out) noexcept;
bool parse_real(std::string_view tok, double& out) noexcept;

std::string format_value(std::int64_t v);
std::string format_value(double v);

/// Format of a stream whose first meaningful line is `first`.
InputFormat detect_format(std::string_view first);

using ValueArray = std::variant<std::vector<std::int64_t>, std::vector<double>>;

/// Reads the n values following the header line `first`. The array is integral
/// when every token is an integer, otherwise real.
ValueArray read_static_values(LineReader& reader, const std::string& first);

struct QueryLine {
  std::int64_t left = 0;
  std::int64_t right = 0;
  std::optional<std::int64_t> rank;
};

QueryLine parse_query_line(std::string_view line, std::size_t line_no);

struct OpLine {
  char kind = 'Q';  // 'I', 'D' or 'Q'
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::optional<std::int64_t> rank;
  double value = 0.0;
};

OpLine parse_op_line(std::string_view line, std::size_t line_no);

}  // namespace rangesel::cli
