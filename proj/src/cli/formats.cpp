#include "formats.hpp"

#include <charconv>
#include <cmath>

namespace rangesel::cli {

bool LineReader::next(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_int(std::string_view tok, std::int64_t& out) noexcept {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && !tok.empty();
}

bool parse_real(std::string_view tok, double& out) noexcept {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && !tok.empty() && !std::isnan(out);
}

std::string format_value(std::int64_t v) { return std::to_string(v); }

std::string format_value(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

InputFormat detect_format(std::string_view first) {
  const auto toks = split_tokens(first);
  if (!toks.empty() && toks[0].size() == 1 && (toks[0] == "I" || toks[0] == "D" || toks[0] == "Q"))
    return InputFormat::op_stream;
  return InputFormat::static_array;
}

ValueArray read_static_values(LineReader& reader, const std::string& first) {
  const auto head = split_tokens(first);
  std::int64_t n = 0;
  if (head.empty() || !parse_int(head[0], n) || n < 1)
    throw ParseError(reader.line_number(), "expected a positive element count");
  if (n >= (std::int64_t{1} << 32) - 1) throw ParseError(reader.line_number(), "element count too large");

  // Values may follow the count on the same line or continue over several lines.
  std::vector<std::string> tokens;
  for (std::size_t i = 1; i < head.size(); ++i) tokens.emplace_back(head[i]);
  std::string line;
  while (static_cast<std::int64_t>(tokens.size()) < n) {
    if (!reader.next(line))
      throw ParseError(reader.line_number(), "expected " + std::to_string(n) + " values, found " +
                                                 std::to_string(tokens.size()));
    for (auto tok : split_tokens(line)) tokens.emplace_back(tok);
  }
  if (static_cast<std::int64_t>(tokens.size()) > n)
    throw ParseError(reader.line_number(), "more than " + std::to_string(n) + " values");

  std::vector<std::int64_t> ints(tokens.size());
  bool integral = true;
  for (std::size_t i = 0; i < tokens.size() && integral; ++i) integral = parse_int(tokens[i], ints[i]);
  if (integral) return ints;
  std::vector<double> reals(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!parse_real(tokens[i], reals[i]))
      throw ParseError(reader.line_number(), "bad value '" + tokens[i] + "'");
  return reals;
}

QueryLine parse_query_line(std::string_view line, std::size_t line_no) {
  const auto toks = split_tokens(line);
  if (toks.size() < 2 || toks.size() > 3) throw ParseError(line_no, "expected 'L R [p]'");
  QueryLine q;
  std::int64_t p = 0;
  if (!parse_int(toks[0], q.left) || !parse_int(toks[1], q.right) || (toks.size() == 3 && !parse_int(toks[2], p)))
    throw ParseError(line_no, "query fields must be integers");
  if (toks.size() == 3) q.rank = p;
  return q;
}

OpLine parse_op_line(std::string_view line, std::size_t line_no) {
  const auto toks = split_tokens(line);
  if (toks.empty()) throw ParseError(line_no, "empty operation");
  OpLine op;
  const std::string_view k = toks[0];
  if (k == "I") {
    op.kind = 'I';
    if (toks.size() != 3 || !parse_int(toks[1], op.a) || !parse_real(toks[2], op.value))
      throw ParseError(line_no, "expected 'I <after-id|0> <value>'");
  } else if (k == "D") {
    op.kind = 'D';
    if (toks.size() != 2 || !parse_int(toks[1], op.a)) throw ParseError(line_no, "expected 'D <id>'");
  } else if (k == "Q") {
    op.kind = 'Q';
    std::int64_t p = 0;
    if (toks.size() < 3 || toks.size() > 4 || !parse_int(toks[1], op.a) || !parse_int(toks[2], op.b) ||
        (toks.size() == 4 && !parse_int(toks[3], p)))
      throw ParseError(line_no, "expected 'Q <id> <id> [p]'");
    if (toks.size() == 4) op.rank = p;
  } else {
    throw ParseError(line_no, "unknown operation '" + std::string(k) + "'");
  }
  return op;
}

}  // namespace rangesel::cli
