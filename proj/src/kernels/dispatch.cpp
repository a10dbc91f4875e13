#include "rangesel/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace rangesel::kernels {

namespace {

Isa probe() noexcept {
#if defined(RANGESEL_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt")) return Isa::avx2;
#endif
  return Isa::scalar;
}

Isa initial() noexcept {
  const Isa best = probe();
  if (const char* env = std::getenv("RANGESEL_ISA"); env && std::string_view(env) == "scalar")
    return Isa::scalar;
  return best;
}

std::atomic<Isa>& active() noexcept {
  static std::atomic<Isa> isa{initial()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::scalar: break;
  }
  return "scalar";
}

Isa detected_isa() noexcept {
  static const Isa best = probe();
  return best;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) isa = Isa::scalar;
  active().store(isa, std::memory_order_relaxed);
  return isa;
}

std::size_t classify_le(std::span<const double> values, std::span<const std::uint32_t> indices,
                        double pivot_value, std::uint32_t pivot_index,
                        std::span<std::uint64_t> out) {
#if defined(RANGESEL_HAVE_AVX2)
  if (active_isa() == Isa::avx2)
    return avx2::classify_le(values, indices, pivot_value, pivot_index, out);
#endif
  return scalar::classify_le(values, indices, pivot_value, pivot_index, out);
}

std::size_t classify_le(std::span<const std::int64_t> values,
                        std::span<const std::uint32_t> indices, std::int64_t pivot_value,
                        std::uint32_t pivot_index, std::span<std::uint64_t> out) {
#if defined(RANGESEL_HAVE_AVX2)
  if (active_isa() == Isa::avx2)
    return avx2::classify_le(values, indices, pivot_value, pivot_index, out);
#endif
  return scalar::classify_le(values, indices, pivot_value, pivot_index, out);
}

std::uint64_t popcount(std::span<const std::uint64_t> words) {
#if defined(RANGESEL_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::popcount(words);
#endif
  return scalar::popcount(words);
}

}  // namespace rangesel::kernels
