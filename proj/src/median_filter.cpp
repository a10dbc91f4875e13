#include "rangesel/median_filter.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "rangesel/dynamic_rmp.hpp"

namespace rangesel {

std::uint16_t GrayImage::clamped(std::ptrdiff_t x, std::ptrdiff_t y) const noexcept {
  const auto cx = std::clamp<std::ptrdiff_t>(x, 0, static_cast<std::ptrdiff_t>(width) - 1);
  const auto cy = std::clamp<std::ptrdiff_t>(y, 0, static_cast<std::ptrdiff_t>(height) - 1);
  return pixels[static_cast<std::size_t>(cy) * width + static_cast<std::size_t>(cx)];
}

void GrayImage::validate() const {
  if (width == 0 || height == 0) throw std::invalid_argument("image has zero width or height");
  if (pixels.size() != width * height) throw std::invalid_argument("pixel count does not match dimensions");
}

namespace {

void check_radius(const GrayImage& img, std::size_t r) {
  img.validate();
  if (r < 1) throw std::invalid_argument("filter radius must be at least 1");
  if (2 * r + 1 > std::min(img.width, img.height)) {
    throw std::invalid_argument("window side " + std::to_string(2 * r + 1) + " exceeds image " +
                                std::to_string(img.width) + "x" + std::to_string(img.height));
  }
}

struct Tile {
  std::size_t x0, y0, w, h;
};

void run_tile(const GrayImage& img, std::size_t r, const Tile& t, double alpha, GrayImage& out,
              FilterStats& acc) {
  const auto ir = static_cast<std::ptrdiff_t>(r);
  const std::size_t cols = t.w + 2 * r;
  const std::size_t rows = 2 * r + 1;
  std::vector<std::uint16_t> band;
  band.reserve(cols * rows);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto x = static_cast<std::ptrdiff_t>(t.x0 + c) - ir;
    for (std::size_t d = 0; d < rows; ++d)
      band.push_back(img.clamped(x, static_cast<std::ptrdiff_t>(t.y0 + d) - ir));
  }

  DynamicRmp<std::uint16_t> rmp(alpha);
  const auto handles = rmp.assign(band);
  std::vector<std::deque<ElementHandle>> column(cols);
  for (std::size_t c = 0; c < cols; ++c)
    column[c].assign(handles.begin() + static_cast<std::ptrdiff_t>(c * rows),
                     handles.begin() + static_cast<std::ptrdiff_t>((c + 1) * rows));

  std::uint64_t updates = 0;
  for (std::size_t dy = 0; dy < t.h; ++dy) {
    const std::size_t y = t.y0 + dy;
    if (dy > 0) {
      const auto incoming = static_cast<std::ptrdiff_t>(y + r);
      for (std::size_t c = 0; c < cols; ++c) {
        auto& col = column[c];
        rmp.erase(col.front());
        col.pop_front();
        const auto x = static_cast<std::ptrdiff_t>(t.x0 + c) - ir;
        col.push_back(rmp.insert_after(col.back(), img.clamped(x, incoming)));
        updates += 2;
      }
    }
    for (std::size_t dx = 0; dx < t.w; ++dx)
      out.at(t.x0 + dx, y) = rmp.query(column[dx].front(), column[dx + 2 * r].back());
  }

  acc.tiles += 1;
  acc.comparisons += rmp.stats().comparisons;
  acc.rebuild_elements += rmp.stats().rebuild_elements;
  acc.queries += rmp.stats().queries;
  acc.updates += updates;
}

}  // namespace

GrayImage median_filter(const GrayImage& img, std::size_t r, const FilterOptions& options,
                        FilterStats* stats) {
  check_radius(img, r);
  const std::size_t side = 3 * r;
  std::vector<Tile> tiles;
  for (std::size_t y = 0; y < img.height; y += side)
    for (std::size_t x = 0; x < img.width; x += side)
      tiles.push_back({x, y, std::min(side, img.width - x), std::min(side, img.height - y)});
  if (options.shuffle_tiles) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(tiles.begin(), tiles.end(), rng);
  }

  GrayImage out(img.width, img.height, img.maxval);
  FilterStats total;
  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(tiles.size())));
  if (threads == 1) {
    for (const Tile& t : tiles) run_tile(img, r, t, options.alpha, out, total);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex merge;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    for (unsigned i = 0; i < threads; ++i) {
      pool.emplace_back([&] {
        FilterStats local;
        try {
          for (std::size_t j = next++; j < tiles.size(); j = next++)
            run_tile(img, r, tiles[j], options.alpha, out, local);
        } catch (...) {
          std::lock_guard lock(merge);
          if (!failure) failure = std::current_exception();
        }
        std::lock_guard lock(merge);
        total.tiles += local.tiles;
        total.comparisons += local.comparisons;
        total.rebuild_elements += local.rebuild_elements;
        total.updates += local.updates;
        total.queries += local.queries;
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  if (stats) *stats = total;
  return out;
}

GrayImage naive_median_filter(const GrayImage& img, std::size_t r) {
  check_radius(img, r);
  GrayImage out(img.width, img.height, img.maxval);
  const auto ir = static_cast<std::ptrdiff_t>(r);
  std::vector<std::uint16_t> window;
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      window.clear();
      for (std::ptrdiff_t dy = -ir; dy <= ir; ++dy)
        for (std::ptrdiff_t dx = -ir; dx <= ir; ++dx)
          window.push_back(img.clamped(static_cast<std::ptrdiff_t>(x) + dx, static_cast<std::ptrdiff_t>(y) + dy));
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>((window.size() - 1) / 2);
      std::nth_element(window.begin(), mid, window.end());
      out.at(x, y) = *mid;
    }
  }
  return out;
}

}  // namespace rangesel
