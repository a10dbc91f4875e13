#include "rangesel/rank_bits.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "rangesel/kernels.hpp"

namespace rangesel {

std::uint64_t popcount_range(std::span<const std::uint64_t> words, std::uint64_t from,
                             std::uint64_t to) noexcept {
  if (from >= to) return 0;
  std::uint64_t w = from / 64;
  const std::uint64_t last = (to - 1) / 64;
  const unsigned head = static_cast<unsigned>(from % 64);
  const unsigned tail = static_cast<unsigned>(to % 64);
  if (w == last) {
    std::uint64_t word = words[w] >> head;
    const unsigned len = static_cast<unsigned>(to - from);
    if (len < 64) word &= (std::uint64_t{1} << len) - 1;
    return static_cast<std::uint64_t>(std::popcount(word));
  }
  std::uint64_t total = static_cast<std::uint64_t>(std::popcount(words[w] >> head));
  for (++w; w < last; ++w) total += static_cast<std::uint64_t>(std::popcount(words[w]));
  std::uint64_t word = words[last];
  if (tail != 0) word &= (std::uint64_t{1} << tail) - 1;
  return total + static_cast<std::uint64_t>(std::popcount(word));
}

RankBitVector RankBitVector::build(std::span<const bool> bits) {
  std::vector<std::uint64_t> words(kernels::words_for(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return from_words(std::move(words), bits.size());
}

RankBitVector RankBitVector::build(const std::vector<bool>& bits) {
  std::vector<std::uint64_t> words(kernels::words_for(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return from_words(std::move(words), bits.size());
}

RankBitVector RankBitVector::from_words(std::vector<std::uint64_t> words, std::size_t size) {
  if (words.size() < kernels::words_for(size))
    throw std::invalid_argument("RankBitVector: word buffer shorter than bit length");
  RankBitVector bv;
  words.resize(kernels::words_for(size));
  if (size % 64 != 0) words.back() &= (std::uint64_t{1} << (size % 64)) - 1;
  bv.words_ = std::move(words);
  bv.size_ = size;
  bv.index();
  return bv;
}

void RankBitVector::index() {
  const std::size_t blocks = size_ / kBlockBits;
  block_ranks_.assign(blocks + 1, 0);
  std::uint64_t running = 0;
  for (std::size_t j = 0; j < blocks; ++j) {
    running += kernels::popcount(
        std::span<const std::uint64_t>(words_).subspan(j * kBlockWords, kBlockWords));
    block_ranks_[j + 1] = running;
  }
}

std::size_t RankBitVector::rank1(std::size_t i) const {
  if (i > size_)
    throw std::out_of_range("rank1: position " + std::to_string(i) + " beyond length " +
                            std::to_string(size_));
  const std::size_t j = i / kBlockBits;
  return static_cast<std::size_t>(block_ranks_[j] +
                                  popcount_range(words_, j * kBlockBits, i));
}

bool RankBitVector::bit(std::size_t i) const {
  if (i < 1 || i > size_) throw std::out_of_range("bit: position outside 1..size");
  return (words_[(i - 1) / 64] >> ((i - 1) % 64)) & 1U;
}

RankBitArena::Handle RankBitArena::append(std::span<const std::uint64_t> bits,
                                          std::size_t size) {
  const std::size_t nwords = kernels::words_for(size);
  if (size <= kBlockBits) {
    const Handle h = packed_bits_;
    packed_.resize(kernels::words_for(packed_bits_ + size), 0);
    for (std::size_t w = 0; w < nwords; ++w) {
      std::uint64_t word = bits[w];
      const std::size_t valid = std::min<std::size_t>(64, size - w * 64);
      if (valid < 64) word &= (std::uint64_t{1} << valid) - 1;
      const std::size_t pos = packed_bits_ + w * 64;
      const unsigned shift = static_cast<unsigned>(pos % 64);
      packed_[pos / 64] |= word << shift;
      if (shift != 0 && shift + valid > 64) packed_[pos / 64 + 1] |= word >> (64 - shift);
    }
    packed_bits_ += size;
    return h;
  }
  const std::size_t header = header_words(size);
  const Handle h = kAlignedTag | aligned_.size();
  std::uint64_t running = 0;
  for (std::size_t b = 0; b < header; ++b) {
    running += kernels::popcount(bits.subspan(b * kBlockWords, kBlockWords));
    aligned_.push_back(running);
  }
  aligned_.insert(aligned_.end(), bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(nwords));
  if (size % 64 != 0) aligned_.back() &= (std::uint64_t{1} << (size % 64)) - 1;
  return h;
}

std::size_t RankBitArena::rank1(Handle h, std::size_t size, std::size_t i) const noexcept {
  if (i == 0) return 0;
  if ((h & kAlignedTag) == 0) return static_cast<std::size_t>(popcount_range(packed_, h, h + i));
  const std::size_t at = static_cast<std::size_t>(h & ~kAlignedTag);
  const std::size_t header = header_words(size);
  const std::size_t blk = std::min(i / kBlockBits, header);
  const std::uint64_t base = blk == 0 ? 0 : aligned_[at + blk - 1];
  const std::uint64_t bits_at = (at + header) * 64;
  return static_cast<std::size_t>(
      base + popcount_range(aligned_, bits_at + blk * kBlockBits, bits_at + i));
}

bool RankBitArena::bit(Handle h, std::size_t size, std::size_t i) const noexcept {
  std::uint64_t pos = 0;
  if ((h & kAlignedTag) == 0) {
    pos = h + i - 1;
    return (packed_[pos / 64] >> (pos % 64)) & 1U;
  }
  const std::size_t at = static_cast<std::size_t>(h & ~kAlignedTag);
  pos = (at + header_words(size)) * 64 + i - 1;
  return (aligned_[pos / 64] >> (pos % 64)) & 1U;
}

void RankBitArena::reserve(std::size_t packed_bits, std::size_t aligned_words) {
  packed_.reserve(kernels::words_for(packed_bits));
  aligned_.reserve(aligned_words);
}

}  // namespace rangesel
