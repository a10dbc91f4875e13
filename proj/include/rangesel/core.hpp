#pragma once

// Shared domain types for range selection: elements ordered by (value, index),
// range queries with 1-based inclusive bounds, instrumentation counters and the
// brute-force reference oracle.

#include <algorithm>
#include <compare>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace rangesel {

/// Scalar types accepted as element values.
template <class T>
concept ElementValue = std::is_arithmetic_v<T> && !std::is_same_v<T, bool>;

/// One input item: its 1-based position in the original array and its value.
template <ElementValue T>
struct Element {
  T value{};
  std::uint32_t index = 0;

  friend bool operator==(const Element&, const Element&) = default;
};

/// Lexicographic order on (value, index). Values must not be NaN.
template <ElementValue T>
constexpr std::strong_ordering total_cmp(const Element<T>& a, const Element<T>& b) noexcept {
  if (a.value < b.value) return std::strong_ordering::less;
  if (b.value < a.value) return std::strong_ordering::greater;
  return a.index <=> b.index;
}

template <ElementValue T>
constexpr bool element_less(const Element<T>& a, const Element<T>& b) noexcept {
  return a.value < b.value || (!(b.value < a.value) && a.index < b.index);
}

/// Rank of the lower median of m items: ceil(m / 2).
inline std::size_t median_rank(std::size_t m) {
  if (m == 0) throw std::invalid_argument("median_rank: empty range");
  return (m + 1) / 2;
}

/// A request for the element of rank `rank` (default: lower median) in A[left..right].
struct RangeQuery {
  std::size_t left = 1;
  std::size_t right = 1;
  std::optional<std::size_t> rank;

  std::size_t length() const noexcept { return right - left + 1; }

  /// Throws std::out_of_range unless 1 <= left <= right <= n and the rank fits.
  void validate(std::size_t n) const {
    if (left < 1 || left > right || right > n) {
      throw std::out_of_range("invalid range [" + std::to_string(left) + ", " +
                              std::to_string(right) + "] for n=" + std::to_string(n));
    }
    if (rank && (*rank < 1 || *rank > length())) {
      throw std::out_of_range("rank " + std::to_string(*rank) + " outside 1.." +
                              std::to_string(length()));
    }
  }

  std::size_t resolved_rank() const { return rank ? *rank : median_rank(length()); }
};

/// Instrumentation counters. All fields only ever grow during a run.
struct Stats {
  std::vector<std::uint64_t> splits_per_level;
  std::uint64_t elements_partitioned = 0;
  std::uint64_t cascade_steps = 0;  // child-position lookups during descents
  std::uint64_t nodes_visited = 0;
  std::uint64_t queries = 0;
  std::uint64_t rebuild_elements = 0;
  std::uint64_t comparisons = 0;

  void record_split(std::size_t level, std::size_t size) {
    if (splits_per_level.size() <= level) splits_per_level.resize(level + 1, 0);
    ++splits_per_level[level];
    elements_partitioned += size;
  }

  std::uint64_t total_splits() const noexcept {
    std::uint64_t s = 0;
    for (auto c : splits_per_level) s += c;
    return s;
  }

  Stats& operator+=(const Stats& o) {
    if (splits_per_level.size() < o.splits_per_level.size())
      splits_per_level.resize(o.splits_per_level.size(), 0);
    for (std::size_t i = 0; i < o.splits_per_level.size(); ++i)
      splits_per_level[i] += o.splits_per_level[i];
    elements_partitioned += o.elements_partitioned;
    cascade_steps += o.cascade_steps;
    nodes_visited += o.nodes_visited;
    queries += o.queries;
    rebuild_elements += o.rebuild_elements;
    comparisons += o.comparisons;
    return *this;
  }
};

/// One level of a traced descent. `left`/`right` are the node-local bounds the
/// level was entered with (predecessor positions for the cascade tree).
struct TraceStep {
  std::size_t level = 0;
  std::size_t node_size = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t rank = 0;
  std::size_t low_count = 0;
  bool went_low = false;
};

struct QueryTrace {
  std::vector<TraceStep> steps;
};

/// Rejects NaN; everything else (including infinities) is totally ordered.
template <ElementValue T>
void check_orderable(std::span<const T> values) {
  if constexpr (std::is_floating_point_v<T>) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i]))
        throw std::invalid_argument("NaN value at position " + std::to_string(i + 1));
    }
  }
}

/// Ground truth: copy A[L..R], sort by (value, index), pick the requested rank.
template <ElementValue T>
Element<T> oracle_select(std::span<const T> values, const RangeQuery& q) {
  q.validate(values.size());
  std::vector<Element<T>> window;
  window.reserve(q.length());
  for (std::size_t i = q.left; i <= q.right; ++i)
    window.push_back({values[i - 1], static_cast<std::uint32_t>(i)});
  std::sort(window.begin(), window.end(), element_less<T>);
  return window[q.resolved_rank() - 1];
}

}  // namespace rangesel
