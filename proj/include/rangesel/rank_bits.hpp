#pragma once

// Bit sequences with constant-time rank. A cumulative 1-count is stored for
// every position that is a multiple of kBlockBits; rank(i) adds the popcount of
// at most one block's worth of words to the nearest table entry.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rangesel {

inline constexpr std::size_t kBlockBits = 512;
inline constexpr std::size_t kBlockWords = kBlockBits / 64;

/// Popcount of bits [from, to) of a packed little-endian bit array.
std::uint64_t popcount_range(std::span<const std::uint64_t> words, std::uint64_t from,
                             std::uint64_t to) noexcept;

/// Immutable bit vector with rank support. Positions are 1-based; rank1(i)
/// counts ones among positions 1..i, and rank1(0) == 0.
class RankBitVector {
 public:
  RankBitVector() = default;

  static RankBitVector build(std::span<const bool> bits);
  static RankBitVector build(const std::vector<bool>& bits);
  /// Takes ownership of packed words holding `size` bits; bits past `size` are ignored.
  static RankBitVector from_words(std::vector<std::uint64_t> words, std::size_t size);

  std::size_t size() const noexcept { return size_; }
  std::size_t ones() const noexcept { return block_ranks_.empty() ? 0 : rank1(size_); }

  /// Throws std::out_of_range when i > size().
  std::size_t rank1(std::size_t i) const;

  /// Bit at 1-based position i.
  bool bit(std::size_t i) const;

  /// Entry j = ones among positions 1..j*kBlockBits.
  std::span<const std::uint64_t> block_ranks() const noexcept { return block_ranks_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::size_t payload_bits() const noexcept { return words_.size() * 64; }
  std::size_t directory_bits() const noexcept { return block_ranks_.size() * 64; }

 private:
  void index();

  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> block_ranks_;
  std::size_t size_ = 0;
};

/// Append-only pool of rank-indexed bit runs, used to store many small bit
/// vectors without per-vector allocations.
///
/// Runs longer than kBlockBits live in the aligned pool: a word-aligned header
/// of ceil(m / kBlockBits) - 1 cumulative counts followed by the bits, padded
/// to a whole word. Shorter runs are bit-packed back to back in the packed
/// pool; their rank needs no table because they span at most one block.
class RankBitArena {
 public:
  /// Handle to one stored run; the run length is supplied by the caller on access.
  using Handle = std::uint64_t;

  /// Appends the first `size` bits of `bits`.
  Handle append(std::span<const std::uint64_t> bits, std::size_t size);

  /// Ones among the first i bits (1-based prefix) of the run.
  std::size_t rank1(Handle h, std::size_t size, std::size_t i) const noexcept;

  bool bit(Handle h, std::size_t size, std::size_t i) const noexcept;

  static constexpr std::size_t header_words(std::size_t size) noexcept {
    return size > kBlockBits ? (size - 1) / kBlockBits : 0;
  }

  std::size_t packed_bits() const noexcept { return packed_bits_; }
  std::size_t aligned_words() const noexcept { return aligned_.size(); }
  std::size_t bytes() const noexcept {
    return (packed_.size() + aligned_.size()) * sizeof(std::uint64_t);
  }

  void reserve(std::size_t packed_bits, std::size_t aligned_words);

 private:
  static constexpr Handle kAlignedTag = Handle{1} << 63;

  std::vector<std::uint64_t> packed_;
  std::size_t packed_bits_ = 0;
  std::vector<std::uint64_t> aligned_;
};

}  // namespace rangesel
