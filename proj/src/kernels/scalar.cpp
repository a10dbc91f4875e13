#include "rangesel/kernels.hpp"

#include <bit>

namespace rangesel::kernels::scalar {

namespace {

template <class T>
std::size_t classify(std::span<const T> values, std::span<const std::uint32_t> indices,
                     T pv, std::uint32_t pi, std::span<std::uint64_t> out) {
  const std::size_t n = values.size();
  std::size_t ones = 0;
  std::size_t j = 0;
  for (std::size_t w = 0; w < words_for(n); ++w) {
    std::uint64_t word = 0;
    const std::size_t end = (j + 64 < n) ? j + 64 : n;
    for (unsigned bit = 0; j < end; ++j, ++bit) {
      const bool le = values[j] < pv || (values[j] == pv && indices[j] <= pi);
      word |= std::uint64_t{le} << bit;
    }
    out[w] = word;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  return ones;
}

}  // namespace

std::size_t classify_le(std::span<const double> values, std::span<const std::uint32_t> indices,
                        double pivot_value, std::uint32_t pivot_index,
                        std::span<std::uint64_t> out) {
  return classify<double>(values, indices, pivot_value, pivot_index, out);
}

std::size_t classify_le(std::span<const std::int64_t> values,
                        std::span<const std::uint32_t> indices, std::int64_t pivot_value,
                        std::uint32_t pivot_index, std::span<std::uint64_t> out) {
  return classify<std::int64_t>(values, indices, pivot_value, pivot_index, out);
}

std::uint64_t popcount(std::span<const std::uint64_t> words) {
  std::uint64_t total = 0;
  for (auto w : words) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

}  // namespace rangesel::kernels::scalar
