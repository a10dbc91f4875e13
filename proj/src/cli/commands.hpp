#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rangesel::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInputFormat = 2 };

struct RunConfig {
  std::string structure;  // cascade | compact | dynamic | oracle; empty = command default
  std::string mode = "lazy";
  std::string strategy = "randomized";
  std::uint64_t seed = 0;
  std::string input = "-";
  std::string output = "-";
  std::size_t radius = 1;
  std::string grid = "n=1024,k=64";
  std::size_t reps = 1;
  std::string gnuplot;  // bench: .dat path; default derives from --output
  unsigned threads = 1;

  // gen
  std::string kind = "static";  // static | ops | pgm
  std::size_t n = 10;
  std::size_t k = 10;
  bool ranks = false;
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t maxval = 255;
};

struct GridPoint {
  std::size_t n;
  std::size_t k;
};

/// Parses `n=a,b,k=x,y` (';' also separates; `2^14` allowed) into the cross product.
std::vector<GridPoint> parse_grid(const std::string& text);

int cmd_query(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_filter(const RunConfig& cfg, std::ostream& err);
int cmd_gen(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Dispatches on `command` and handles --input/--output file redirection.
int run(const std::string& command, const RunConfig& cfg, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace rangesel::cli
