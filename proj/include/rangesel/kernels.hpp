#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2 version; the public entry points dispatch at runtime on
// CPU support. Set RANGESEL_ISA=scalar in the environment to force the
// reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <type_traits>

namespace rangesel::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best ISA this CPU and build support.
Isa detected_isa() noexcept;

/// ISA the dispatching entry points currently use.
Isa active_isa() noexcept;

/// Override the dispatch target. Requesting an unsupported ISA falls back to
/// scalar; returns the ISA actually selected.
Isa set_active_isa(Isa isa) noexcept;

/// Number of 64-bit words needed for `bits` bits.
constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + 63) / 64; }

// classify_le: for j < values.size(), bit j of `out` is set iff
// (values[j], indices[j]) <= (pivot_value, pivot_index) in lexicographic order.
// `out` must hold words_for(values.size()) words; trailing bits are cleared.
// Returns the number of set bits.

std::size_t classify_le(std::span<const double> values, std::span<const std::uint32_t> indices,
                        double pivot_value, std::uint32_t pivot_index,
                        std::span<std::uint64_t> out);
std::size_t classify_le(std::span<const std::int64_t> values,
                        std::span<const std::uint32_t> indices, std::int64_t pivot_value,
                        std::uint32_t pivot_index, std::span<std::uint64_t> out);

/// Total population count of `words`.
std::uint64_t popcount(std::span<const std::uint64_t> words);

namespace scalar {
std::size_t classify_le(std::span<const double> values, std::span<const std::uint32_t> indices,
                        double pivot_value, std::uint32_t pivot_index,
                        std::span<std::uint64_t> out);
std::size_t classify_le(std::span<const std::int64_t> values,
                        std::span<const std::uint32_t> indices, std::int64_t pivot_value,
                        std::uint32_t pivot_index, std::span<std::uint64_t> out);
std::uint64_t popcount(std::span<const std::uint64_t> words);
}  // namespace scalar

#if defined(RANGESEL_HAVE_AVX2)
namespace avx2 {
std::size_t classify_le(std::span<const double> values, std::span<const std::uint32_t> indices,
                        double pivot_value, std::uint32_t pivot_index,
                        std::span<std::uint64_t> out);
std::size_t classify_le(std::span<const std::int64_t> values,
                        std::span<const std::uint32_t> indices, std::int64_t pivot_value,
                        std::uint32_t pivot_index, std::span<std::uint64_t> out);
std::uint64_t popcount(std::span<const std::uint64_t> words);
}  // namespace avx2
#endif

/// Generic fallback for value types without a dedicated kernel.
template <class T>
std::size_t classify_le_generic(std::span<const T> values, std::span<const std::uint32_t> indices,
                                T pivot_value, std::uint32_t pivot_index,
                                std::span<std::uint64_t> out) {
  const std::size_t n = values.size();
  for (std::size_t w = 0; w < words_for(n); ++w) out[w] = 0;
  std::size_t ones = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const bool le = values[j] < pivot_value ||
                    (!(pivot_value < values[j]) && indices[j] <= pivot_index);
    out[j / 64] |= std::uint64_t{le} << (j % 64);
    ones += le;
  }
  return ones;
}

/// Dispatches to the SIMD kernels for double / int64 and the generic loop otherwise.
template <class T>
std::size_t classify_le_any(std::span<const T> values, std::span<const std::uint32_t> indices,
                            T pivot_value, std::uint32_t pivot_index,
                            std::span<std::uint64_t> out) {
  if constexpr (std::is_same_v<T, double> || std::is_same_v<T, std::int64_t>) {
    return classify_le(values, indices, pivot_value, pivot_index, out);
  } else {
    return classify_le_generic<T>(values, indices, pivot_value, pivot_index, out);
  }
}

}  // namespace rangesel::kernels
