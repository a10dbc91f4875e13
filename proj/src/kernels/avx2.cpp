// Compiled with -mavx2 -mpopcnt; only reached after a runtime CPU check.

#include "rangesel/kernels.hpp"

#include <immintrin.h>

#include <bit>

namespace rangesel::kernels::avx2 {

namespace {

// Four (value, index) pairs <= pivot, as a 4-bit mask.
inline unsigned le_mask4(const double* v, const std::uint32_t* idx, __m256d pv, __m256i pi) {
  const __m256d x = _mm256_loadu_pd(v);
  const __m256i ix = _mm256_cvtepu32_epi64(
      _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx)));
  const __m256d lt = _mm256_cmp_pd(x, pv, _CMP_LT_OQ);
  const __m256d eq = _mm256_cmp_pd(x, pv, _CMP_EQ_OQ);
  const __m256i idx_gt = _mm256_cmpgt_epi64(ix, pi);
  const __m256d tie = _mm256_andnot_pd(_mm256_castsi256_pd(idx_gt), eq);
  return static_cast<unsigned>(_mm256_movemask_pd(_mm256_or_pd(lt, tie)));
}

inline unsigned le_mask4(const std::int64_t* v, const std::uint32_t* idx, __m256i pv,
                         __m256i pi) {
  const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v));
  const __m256i ix = _mm256_cvtepu32_epi64(
      _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx)));
  const __m256i lt = _mm256_cmpgt_epi64(pv, x);
  const __m256i eq = _mm256_cmpeq_epi64(x, pv);
  const __m256i idx_gt = _mm256_cmpgt_epi64(ix, pi);
  const __m256i le = _mm256_or_si256(lt, _mm256_andnot_si256(idx_gt, eq));
  return static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(le)));
}

template <class T, class Pivot>
std::size_t classify(std::span<const T> values, std::span<const std::uint32_t> indices, T pv_s,
                     std::uint32_t pi_s, Pivot pv, std::span<std::uint64_t> out) {
  const std::size_t n = values.size();
  // Indices are unsigned 32-bit; widened to int64 they compare correctly as signed.
  const __m256i pi = _mm256_set1_epi64x(static_cast<std::int64_t>(pi_s));
  const T* v = values.data();
  const std::uint32_t* ix = indices.data();
  std::size_t ones = 0;
  std::size_t j = 0;
  std::size_t w = 0;
  for (; j + 64 <= n; j += 64, ++w) {
    std::uint64_t word = 0;
    for (unsigned g = 0; g < 16; ++g)
      word |= std::uint64_t{le_mask4(v + j + 4 * g, ix + j + 4 * g, pv, pi)} << (4 * g);
    out[w] = word;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  if (j < n) {
    std::uint64_t word = 0;
    unsigned bit = 0;
    for (; j + 4 <= n; j += 4, bit += 4)
      word |= std::uint64_t{le_mask4(v + j, ix + j, pv, pi)} << bit;
    for (; j < n; ++j, ++bit) {
      const bool le = v[j] < pv_s || (v[j] == pv_s && ix[j] <= pi_s);
      word |= std::uint64_t{le} << bit;
    }
    out[w] = word;
    ones += static_cast<std::size_t>(std::popcount(word));
  }
  return ones;
}

// Nibble-LUT popcount over 256-bit lanes, summed with SAD.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
}

}  // namespace

std::size_t classify_le(std::span<const double> values, std::span<const std::uint32_t> indices,
                        double pivot_value, std::uint32_t pivot_index,
                        std::span<std::uint64_t> out) {
  return classify<double>(values, indices, pivot_value, pivot_index,
                          _mm256_set1_pd(pivot_value), out);
}

std::size_t classify_le(std::span<const std::int64_t> values,
                        std::span<const std::uint32_t> indices, std::int64_t pivot_value,
                        std::uint32_t pivot_index, std::span<std::uint64_t> out) {
  return classify<std::int64_t>(values, indices, pivot_value, pivot_index,
                                _mm256_set1_epi64x(pivot_value), out);
}

std::uint64_t popcount(std::span<const std::uint64_t> words) {
  const std::uint64_t* p = words.data();
  const std::size_t n = words.size();
  std::size_t i = 0;
  __m256i acc = _mm256_setzero_si256();
  // Byte counters hold at most 8 per step; flush through SAD every iteration.
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), _mm256_setzero_si256()));
  }
  std::uint64_t total = static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 0)) +
                        static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 1)) +
                        static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 2)) +
                        static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 3));
  for (; i < n; ++i) total += static_cast<std::uint64_t>(std::popcount(p[i]));
  return total;
}

}  // namespace rangesel::kernels::avx2
