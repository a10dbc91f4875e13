#include "rangesel/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace rangesel {

namespace {

void skip_space_and_comments(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

std::size_t read_header_number(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  if (!std::isdigit(in.peek())) throw PgmError(std::string("PGM header: expected ") + what);
  std::size_t v = 0;
  while (std::isdigit(in.peek())) {
    v = v * 10 + static_cast<std::size_t>(in.get() - '0');
    if (v > (std::size_t{1} << 32)) throw PgmError(std::string("PGM header: ") + what + " too large");
  }
  return v;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != '5') throw PgmError("not a binary PGM (P5) file");
  const std::size_t w = read_header_number(in, "width");
  const std::size_t h = read_header_number(in, "height");
  const std::size_t maxval = read_header_number(in, "maxval");
  if (w == 0 || h == 0) throw PgmError("PGM has zero width or height");
  if (maxval == 0 || maxval > 65535) throw PgmError("PGM maxval must be in 1..65535");
  if (!std::isspace(in.get())) throw PgmError("PGM header: missing whitespace before raster");

  GrayImage img(w, h, static_cast<std::uint16_t>(maxval));
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(w * h * bytes_per);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw PgmError("PGM raster truncated");
  for (std::size_t i = 0; i < w * h; ++i) {
    const std::uint16_t v = bytes_per == 2 ? static_cast<std::uint16_t>(raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
    if (v > maxval) throw PgmError("PGM sample exceeds maxval");
    img.pixels[i] = v;
  }
  return img;
}

GrayImage read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("cannot open " + path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  img.validate();
  for (auto v : img.pixels)
    if (v > img.maxval) throw PgmError("pixel value exceeds maxval");
  out << "P5\n" << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
  if (img.maxval > 255) {
    std::vector<unsigned char> raw(img.pixels.size() * 2);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      raw[2 * i] = static_cast<unsigned char>(img.pixels[i] >> 8);
      raw[2 * i + 1] = static_cast<unsigned char>(img.pixels[i] & 0xFF);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    std::vector<unsigned char> raw(img.pixels.begin(), img.pixels.end());
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }
  if (!out) throw PgmError("PGM write failed");
}

void write_pgm_file(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PgmError("cannot open " + path + " for writing");
  write_pgm(out, img);
}

}  // namespace rangesel
