#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rangesel/median_filter.hpp"
#include "rangesel/pgm.hpp"

using namespace rangesel;

namespace {

GrayImage random_image(std::mt19937_64& rng, std::size_t w, std::size_t h, std::uint16_t maxval) {
  GrayImage img(w, h, maxval);
  for (auto& p : img.pixels) p = static_cast<std::uint16_t>(rng() % (maxval + 1U));
  return img;
}

}  // namespace

TEST(MedianFilter, ConstantImageIsFixed) {
  GrayImage img(20, 17, 255);
  std::fill(img.pixels.begin(), img.pixels.end(), 77);
  for (std::size_t r : {1U, 2U, 3U, 8U}) EXPECT_EQ(median_filter(img, r), img);
}

TEST(MedianFilter, HandCheckedCenter) {
  GrayImage img(5, 5, 255);
  for (std::size_t i = 0; i < 25; ++i) img.pixels[i] = static_cast<std::uint16_t>(i + 1);
  const auto out = median_filter(img, 1);
  EXPECT_EQ(out.at(2, 2), 13);
  // Corner window with replicated borders: {1,1,2,1,1,2,6,6,7} -> 2.
  EXPECT_EQ(out.at(0, 0), 2);
  EXPECT_EQ(out, naive_median_filter(img, 1));
}

TEST(MedianFilter, MatchesNaiveOnRandomImages) {
  std::mt19937_64 rng(71);
  for (std::size_t r : {1U, 2U, 5U}) {
    for (int i = 0; i < 3; ++i) {
      const auto img = random_image(rng, 64, 64, 255);
      EXPECT_EQ(median_filter(img, r), naive_median_filter(img, r)) << "r=" << r;
    }
  }
}

TEST(MedianFilter, MatchesNaiveOnOddShapes) {
  std::mt19937_64 rng(72);
  const std::size_t shapes[][2] = {{15, 15}, {31, 17}, {128, 40}, {45, 128}, {100, 101}};
  for (const auto& s : shapes) {
    for (std::size_t r : {1U, 3U, 7U}) {
      if (2 * r + 1 > std::min(s[0], s[1])) continue;
      const auto img = random_image(rng, s[0], s[1], static_cast<std::uint16_t>(r % 2 ? 3 : 65535));
      EXPECT_EQ(median_filter(img, r), naive_median_filter(img, r)) << s[0] << "x" << s[1] << " r=" << r;
    }
  }
}

TEST(MedianFilter, TileOrderAndThreadsDoNotMatter) {
  std::mt19937_64 rng(73);
  const auto img = random_image(rng, 90, 70, 255);
  FilterStats base_stats;
  const auto base = median_filter(img, 2, {}, &base_stats);
  FilterOptions shuffled;
  shuffled.shuffle_tiles = true;
  shuffled.seed = 5;
  FilterStats shuffled_stats;
  EXPECT_EQ(median_filter(img, 2, shuffled, &shuffled_stats), base);
  EXPECT_EQ(shuffled_stats.comparisons, base_stats.comparisons);
  FilterOptions threaded;
  threaded.threads = 4;
  FilterStats threaded_stats;
  EXPECT_EQ(median_filter(img, 2, threaded, &threaded_stats), base);
  EXPECT_EQ(threaded_stats.tiles, base_stats.tiles);
  EXPECT_EQ(threaded_stats.comparisons, base_stats.comparisons);
  EXPECT_EQ(base_stats.queries, img.pixels.size());
}

TEST(MedianFilter, RejectsBadRadius) {
  GrayImage img(10, 6, 255);
  EXPECT_THROW(median_filter(img, 0), std::invalid_argument);
  EXPECT_THROW(median_filter(img, 3), std::invalid_argument);
  EXPECT_NO_THROW(median_filter(img, 2));
  EXPECT_THROW(naive_median_filter(img, 3), std::invalid_argument);
  GrayImage broken(4, 4, 255);
  broken.pixels.pop_back();
  EXPECT_THROW(median_filter(broken, 1), std::invalid_argument);
}

TEST(Pgm, RoundTripEightBit) {
  std::mt19937_64 rng(74);
  const auto img = random_image(rng, 13, 7, 200);
  std::stringstream ss;
  write_pgm(ss, img);
  EXPECT_EQ(ss.str().size(), std::string("P5\n13 7\n200\n").size() + 13 * 7);
  EXPECT_EQ(read_pgm(ss), img);
}

TEST(Pgm, SixteenBitIsBigEndian) {
  GrayImage img(2, 1, 1000);
  img.pixels = {0x0102, 0x03E8};
  std::stringstream ss;
  write_pgm(ss, img);
  const std::string s = ss.str();
  const std::string header = "P5\n2 1\n1000\n";
  ASSERT_EQ(s.size(), header.size() + 4);
  EXPECT_EQ(s.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size()]), 0x01);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 1]), 0x02);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 2]), 0x03);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 3]), 0xE8);
  EXPECT_EQ(read_pgm(ss), img);
}

TEST(Pgm, HeaderCommentsAndWhitespace) {
  std::string data = "P5 # comment\n# another\n3\t2\n  255\n";
  data += std::string("\x01\x02\x03\x04\x05\x06", 6);
  std::istringstream in(data);
  const auto img = read_pgm(in);
  EXPECT_EQ(img.width, 3U);
  EXPECT_EQ(img.height, 2U);
  EXPECT_EQ(img.at(2, 1), 6);
}

TEST(Pgm, MalformedInputsRejected) {
  const std::string cases[] = {
      "P2\n2 2\n255\n1 2 3 4",
      "P5\n2 2\n255\n\x01\x02",
      "P5\n2 2\n0\n\x01\x02\x03\x04",
      "P5\n2 2\n70000\n",
      "P5\n0 2\n255\n",
      "P5\nx 2\n255\n",
      "P5\n2 1\n10\n\x01\x20",
  };
  for (const auto& c : cases) {
    std::istringstream in(c);
    EXPECT_THROW(read_pgm(in), PgmError) << c;
  }
  EXPECT_THROW(read_pgm_file("/nonexistent/file.pgm"), PgmError);
}
