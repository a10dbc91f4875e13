#pragma once

// Binary PGM (P5) input and output. Samples are one byte when maxval < 256,
// otherwise two bytes, most significant first.

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rangesel/median_filter.hpp"

namespace rangesel {

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GrayImage read_pgm(std::istream& in);
GrayImage read_pgm_file(const std::string& path);
void write_pgm(std::ostream& out, const GrayImage& img);
void write_pgm_file(const std::string& path, const GrayImage& img);

}  // namespace rangesel
