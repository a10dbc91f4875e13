#pragma once

// Linear-space variant of the value-partition tree. An internal node stores
// only one bit per element (1 = goes to the low child) with rank support;
// query bounds are translated into child-local coordinates with two rank
// calls per level. Values exist only at unsplit nodes (released on split)
// and at the singleton leaves, which also keep the original index.
//
// Layout: 16-byte node records, leaves as tagged references into flat payload
// arrays, and all node bit vectors in one RankBitArena. Node sizes are not
// stored; they follow from the root size because every split is an exact
// ceil/floor halving.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rangesel/core.hpp"
#include "rangesel/kernels.hpp"
#include "rangesel/rank_bits.hpp"
#include "rangesel/selection.hpp"

namespace rangesel {

struct CompactSpaceReport {
  struct Level {
    std::size_t nodes = 0;
    std::size_t payload_bits = 0;    // one bit per element of every split node
    std::size_t directory_bits = 0;  // cumulative-count entries
    std::size_t padding_bits = 0;    // word rounding of block-aligned runs
  };
  std::vector<Level> levels;
  std::size_t elements = 0;
  std::size_t leaves = 0;
  std::size_t leaf_bytes = 0;
  std::size_t node_bytes = 0;
  std::size_t pending_bytes = 0;  // values still held by unsplit nodes
  std::size_t arena_bytes = 0;
  std::size_t total_bytes = 0;

  std::size_t payload_bits() const noexcept {
    std::size_t s = 0;
    for (const auto& l : levels) s += l.payload_bits;
    return s;
  }
  std::size_t directory_bits() const noexcept {
    std::size_t s = 0;
    for (const auto& l : levels) s += l.directory_bits;
    return s;
  }
  double words_per_element() const noexcept {
    return elements == 0 ? 0.0 : static_cast<double>(total_bytes) / 8.0 / static_cast<double>(elements);
  }
};

template <ElementValue T>
class CompactTree {
 public:
  /// Position of a node during a walk; sizes and levels are implied by the path.
  struct Cursor {
    std::uint32_t ref = 0;
    std::size_t size = 0;
    std::size_t level = 0;
  };

  explicit CompactTree(std::span<const T> values, SelectionStrategy strategy = {})
      : strategy_(strategy), n_(values.size()) {
    if (values.empty()) throw std::invalid_argument("CompactTree: empty input");
    if (values.size() >= kLeafTag) throw std::length_error("CompactTree: input too large");
    check_orderable(values);
    if (values.size() == 1) {
      root_ = make_leaf(values[0], 1);
      return;
    }
    Pending p = Pending::make(values.size());
    std::copy(values.begin(), values.end(), p.values.get());
    for (std::size_t i = 0; i < values.size(); ++i) p.indices[i] = static_cast<std::uint32_t>(i + 1);
    pending_elements_ = values.size();
    root_ = make_node(std::move(p));
  }

  std::size_t size() const noexcept { return n_; }
  const Stats& stats() const noexcept { return stats_; }
  Cursor root() const noexcept { return Cursor{root_, n_, 0}; }
  bool complete() const noexcept { return live_pending_ == 0; }

  /// Throw std::logic_error when a descent leaves the node-local bounds.
  void set_verify_bounds(bool on) noexcept { verify_ = on; }

  static bool is_leaf(const Cursor& c) noexcept { return (c.ref & kLeafTag) != 0; }
  bool is_split(const Cursor& c) const noexcept {
    return !is_leaf(c) && nodes_[c.ref].low != kUnsplit;
  }

  std::pair<Cursor, Cursor> children(const Cursor& c) const {
    if (!is_split(c)) throw std::logic_error("children: node not split");
    const Node& nd = nodes_[c.ref];
    return {Cursor{nd.low, (c.size + 1) / 2, c.level + 1}, Cursor{nd.high, c.size / 2, c.level + 1}};
  }

  /// Low-bit vector of a split node, positions 1..size.
  std::vector<bool> lowbits(const Cursor& c) const {
    if (!is_split(c)) throw std::logic_error("lowbits: node not split");
    std::vector<bool> bits(c.size);
    for (std::size_t i = 1; i <= c.size; ++i) bits[i - 1] = arena_.bit(nodes_[c.ref].bits, c.size, i);
    return bits;
  }

  std::size_t lowbits_rank(const Cursor& c, std::size_t i) const {
    if (!is_split(c)) throw std::logic_error("lowbits_rank: node not split");
    if (i > c.size) throw std::out_of_range("lowbits_rank: position beyond node");
    return arena_.rank1(nodes_[c.ref].bits, c.size, i);
  }

  /// Values still stored at an unsplit node (empty once split).
  std::span<const T> node_values(const Cursor& c) const {
    if (is_leaf(c)) return {&leaf_values_[c.ref & ~kLeafTag], 1};
    const Node& nd = nodes_[c.ref];
    if (nd.low != kUnsplit) return {};
    return {pending_[nd.bits].values.get(), c.size};
  }

  Element<T> leaf_payload(const Cursor& c) const {
    if (!is_leaf(c)) throw std::logic_error("leaf_payload: not a leaf");
    const std::uint32_t id = c.ref & ~kLeafTag;
    return Element<T>{leaf_values_[id], leaf_indices_[id]};
  }

  /// Replaces the node's values by its low-bit vector and two children.
  void split(const Cursor& c) {
    if (is_leaf(c)) throw std::logic_error("split: leaf");
    if (nodes_[c.ref].low != kUnsplit) throw std::logic_error("split: node already split");
    const std::size_t m = c.size;
    const std::size_t low_size = (m + 1) / 2;
    const std::uint32_t slot = static_cast<std::uint32_t>(nodes_[c.ref].bits);
    Pending mine = std::move(pending_[slot]);
    free_slots_.push_back(slot);
    --live_pending_;
    pending_elements_ -= m;

    scratch_.resize(m);
    for (std::size_t j = 0; j < m; ++j) scratch_[j] = Element<T>{mine.values[j], mine.indices[j]};
    SelectionStrategy s = strategy_;
    s.seed = mix_seed(strategy_.seed ^ mix_seed(split_counter_++));
    const Element<T> pivot =
        select_kth_inplace<T>(std::span<Element<T>>(scratch_), low_size, s, &stats_.comparisons);

    mask_.resize(kernels::words_for(m));
    const std::size_t ones = kernels::classify_le_any<T>(
        std::span<const T>(mine.values.get(), m), std::span<const std::uint32_t>(mine.indices.get(), m),
        pivot.value, pivot.index, mask_);
    stats_.comparisons += m;
    if (ones != low_size) throw std::logic_error("split: pivot is not the median");
    const RankBitArena::Handle handle = arena_.append(mask_, m);

    Pending low = Pending::make(low_size);
    Pending high = Pending::make(m - low_size);
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if ((mask_[j / 64] >> (j % 64)) & 1U) {
        low.values[lo] = mine.values[j];
        low.indices[lo++] = mine.indices[j];
      } else {
        high.values[hi] = mine.values[j];
        high.indices[hi++] = mine.indices[j];
      }
    }
    mine = Pending{};  // the node keeps bits only from here on

    const std::uint32_t low_ref = adopt(std::move(low), low_size);
    const std::uint32_t high_ref = adopt(std::move(high), m - low_size);
    Node& nd = nodes_[c.ref];
    nd.bits = handle;
    nd.low = low_ref;
    nd.high = high_ref;

    stats_.record_split(c.level, m);
    if (levels_.size() <= c.level) levels_.resize(c.level + 1);
    auto& lvl = levels_[c.level];
    ++lvl.nodes;
    lvl.payload_bits += m;
    lvl.directory_bits += RankBitArena::header_words(m) * 64;
    if (m > kBlockBits) lvl.padding_bits += kernels::words_for(m) * 64 - m;
  }

  /// Returns (value, original index) of the requested rank in A[left..right].
  Element<T> query(const RangeQuery& q, QueryTrace* trace = nullptr) {
    q.validate(n_);
    ++stats_.queries;
    std::size_t left = q.left;
    std::size_t right = q.right;
    std::size_t p = q.resolved_rank();
    Cursor c = root();
    while (true) {
      ++stats_.nodes_visited;
      if (verify_ && (left < 1 || left > right || right > c.size || p < 1 || p > right - left + 1))
        throw std::logic_error("compact descent left node-local bounds");
      if (is_leaf(c)) return leaf_payload(c);
      if (nodes_[c.ref].low == kUnsplit) split(c);
      const Node& nd = nodes_[c.ref];
      const std::size_t l = arena_.rank1(nd.bits, c.size, left - 1);
      const std::size_t r = arena_.rank1(nd.bits, c.size, right);
      stats_.cascade_steps += 2;
      const std::size_t in_low = r - l;
      const bool go_low = p <= in_low;
      if (trace) trace->steps.push_back({c.level, c.size, left, right, p, in_low, go_low});
      if (go_low) {
        left = l + 1;
        right = r;
        c = Cursor{nd.low, (c.size + 1) / 2, c.level + 1};
      } else {
        left -= l;
        right -= r;
        p -= in_low;
        c = Cursor{nd.high, c.size / 2, c.level + 1};
      }
    }
  }

  /// Read-only query for a complete tree; safe to call concurrently.
  Element<T> query_shared(const RangeQuery& q) const {
    q.validate(n_);
    std::size_t left = q.left;
    std::size_t right = q.right;
    std::size_t p = q.resolved_rank();
    Cursor c = root();
    while (!is_leaf(c)) {
      const Node& nd = nodes_[c.ref];
      if (nd.low == kUnsplit) throw std::logic_error("query_shared: tree not fully built");
      const std::size_t l = arena_.rank1(nd.bits, c.size, left - 1);
      const std::size_t r = arena_.rank1(nd.bits, c.size, right);
      if (p <= r - l) {
        left = l + 1;
        right = r;
        c = Cursor{nd.low, (c.size + 1) / 2, c.level + 1};
      } else {
        left -= l;
        right -= r;
        p -= r - l;
        c = Cursor{nd.high, c.size / 2, c.level + 1};
      }
    }
    return leaf_payload(c);
  }

  void build_eager() {
    reserve_full();
    std::vector<Cursor> stack{root()};
    while (!stack.empty()) {
      const Cursor c = stack.back();
      stack.pop_back();
      if (is_leaf(c)) continue;
      if (nodes_[c.ref].low == kUnsplit) split(c);
      auto [low, high] = children(c);
      stack.push_back(high);
      stack.push_back(low);
    }
  }

  CompactSpaceReport space_report() const {
    CompactSpaceReport rep;
    rep.levels = levels_;
    rep.elements = n_;
    rep.leaves = leaf_values_.size();
    rep.leaf_bytes = leaf_values_.size() * (sizeof(T) + sizeof(std::uint32_t));
    rep.node_bytes = nodes_.size() * sizeof(Node);
    rep.pending_bytes = pending_elements_ * (sizeof(T) + sizeof(std::uint32_t)) +
                        pending_.size() * sizeof(Pending) +
                        free_slots_.size() * sizeof(std::uint32_t);
    rep.arena_bytes = arena_.bytes();
    rep.total_bytes = rep.leaf_bytes + rep.node_bytes + rep.pending_bytes + rep.arena_bytes;
    return rep;
  }

 private:
  static constexpr std::uint32_t kLeafTag = std::uint32_t{1} << 31;
  static constexpr std::uint32_t kUnsplit = std::numeric_limits<std::uint32_t>::max();

  // While low == kUnsplit, `bits` is the pending slot holding the node's values.
  struct Node {
    std::uint64_t bits;
    std::uint32_t low;
    std::uint32_t high;
  };
  static_assert(sizeof(Node) == 16);

  struct Pending {
    std::unique_ptr<T[]> values;
    std::unique_ptr<std::uint32_t[]> indices;

    static Pending make(std::size_t n) {
      return Pending{std::make_unique_for_overwrite<T[]>(n),
                     std::make_unique_for_overwrite<std::uint32_t[]>(n)};
    }
  };

  std::uint32_t make_leaf(T value, std::uint32_t index) {
    leaf_values_.push_back(value);
    leaf_indices_.push_back(index);
    return kLeafTag | static_cast<std::uint32_t>(leaf_values_.size() - 1);
  }

  std::uint32_t make_node(Pending p) {
    std::uint32_t slot = 0;
    if (!free_slots_.empty()) {
      slot = free_slots_.back();
      free_slots_.pop_back();
      pending_[slot] = std::move(p);
    } else {
      slot = static_cast<std::uint32_t>(pending_.size());
      pending_.push_back(std::move(p));
    }
    ++live_pending_;
    nodes_.push_back(Node{slot, kUnsplit, kUnsplit});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  std::uint32_t adopt(Pending p, std::size_t size) {
    if (size == 1) return make_leaf(p.values[0], p.indices[0]);
    pending_elements_ += size;
    return make_node(std::move(p));
  }

  void reserve_full() {
    std::map<std::size_t, std::size_t> level{{n_, 1}};
    std::size_t internal = 0;
    std::size_t leaves = 0;
    std::size_t packed = 0;
    std::size_t aligned = 0;
    while (!level.empty()) {
      std::map<std::size_t, std::size_t> next;
      for (auto [m, count] : level) {
        if (m < 2) {
          leaves += count;
          continue;
        }
        internal += count;
        if (m <= kBlockBits) {
          packed += m * count;
        } else {
          aligned += (RankBitArena::header_words(m) + kernels::words_for(m)) * count;
        }
        next[(m + 1) / 2] += count;
        next[m / 2] += count;
      }
      level = std::move(next);
    }
    nodes_.reserve(internal);
    leaf_values_.reserve(leaves);
    leaf_indices_.reserve(leaves);
    arena_.reserve(packed, aligned);
  }

  SelectionStrategy strategy_;
  std::size_t n_ = 0;
  std::uint32_t root_ = 0;
  std::vector<Node> nodes_;
  std::vector<Pending> pending_;
  std::vector<std::uint32_t> free_slots_;
  std::size_t live_pending_ = 0;
  std::size_t pending_elements_ = 0;
  std::vector<T> leaf_values_;
  std::vector<std::uint32_t> leaf_indices_;
  RankBitArena arena_;
  std::vector<CompactSpaceReport::Level> levels_;
  Stats stats_;
  std::uint64_t split_counter_ = 0;
  bool verify_ = false;
  std::vector<Element<T>> scratch_;
  std::vector<std::uint64_t> mask_;
};

}  // namespace rangesel
