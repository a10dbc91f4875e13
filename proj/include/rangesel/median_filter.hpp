#pragma once

// 2D median filter over square (2r+1) x (2r+1) windows with replicated borders.
//
// The image is cut into tiles of 3r x 3r output pixels. A tile keeps the
// current band of 2r+1 input rows, widened by r columns on each side, in a
// DynamicRmp in column-major order, so every window is one contiguous handle
// range. Moving down one row replaces the top pixel of each column with a new
// bottom pixel.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rangesel {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint16_t maxval = 255;
  std::vector<std::uint16_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, std::uint16_t max = 255)
      : width(w), height(h), maxval(max), pixels(w * h, 0) {}

  std::uint16_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  std::uint16_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  /// Pixel with coordinates clamped to the image.
  std::uint16_t clamped(std::ptrdiff_t x, std::ptrdiff_t y) const noexcept;

  /// Throws std::invalid_argument on empty or inconsistent dimensions.
  void validate() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct FilterOptions {
  bool shuffle_tiles = false;  // process tiles in a seeded random order
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double alpha = 0.25;
};

struct FilterStats {
  std::uint64_t tiles = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t rebuild_elements = 0;
  std::uint64_t updates = 0;  // inserts + deletes
  std::uint64_t queries = 0;
};

/// Median filter through the dynamic range-selection structure.
GrayImage median_filter(const GrayImage& img, std::size_t r, const FilterOptions& options = {},
                        FilterStats* stats = nullptr);

/// Reference filter: copies and partially sorts every window.
GrayImage naive_median_filter(const GrayImage& img, std::size_t r);

}  // namespace rangesel
