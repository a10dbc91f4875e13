#pragma once

// k-th smallest element under the (value, index) order, plus the stable
// low/high partition used by node splits.

#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rangesel/core.hpp"

namespace rangesel {

struct SelectionStrategy {
  enum class Kind { deterministic, randomized };
  Kind kind = Kind::randomized;
  std::uint64_t seed = 0;
};

/// splitmix64 finalizer; used to derive independent per-split seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace detail {

template <class T>
struct CountingLess {
  std::uint64_t* counter;
  bool operator()(const Element<T>& a, const Element<T>& b) const noexcept {
    if (counter) ++*counter;
    return element_less(a, b);
  }
};

template <class T>
void insertion_sort(std::span<Element<T>> a, CountingLess<T> less) {
  for (std::size_t i = 1; i < a.size(); ++i) {
    Element<T> x = a[i];
    std::size_t j = i;
    while (j > 0 && less(x, a[j - 1])) {
      a[j] = a[j - 1];
      --j;
    }
    a[j] = x;
  }
}

// Moves everything smaller than a[pivot_pos] in front of it; returns its final slot.
// Keys are distinct under the total order, so two-way partitioning is exact.
template <class T>
std::size_t partition_around(std::span<Element<T>> a, std::size_t pivot_pos,
                             CountingLess<T> less) {
  std::swap(a[pivot_pos], a[a.size() - 1]);
  const Element<T> pivot = a[a.size() - 1];
  std::size_t store = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    if (less(a[i], pivot)) std::swap(a[i], a[store++]);
  }
  std::swap(a[store], a[a.size() - 1]);
  return store;
}

// Median of medians with groups of five; k is 0-based. Returns the slot holding
// the answer after the call.
template <class T>
std::size_t mom_select(std::span<Element<T>> a, std::size_t k, CountingLess<T> less) {
  std::size_t lo = 0;
  std::size_t hi = a.size();
  while (true) {
    auto part = a.subspan(lo, hi - lo);
    if (part.size() <= 10) {
      insertion_sort(part, less);
      return k;
    }
    std::size_t groups = 0;
    for (std::size_t g = 0; g < part.size(); g += 5) {
      const std::size_t len = std::min<std::size_t>(5, part.size() - g);
      auto group = part.subspan(g, len);
      insertion_sort(group, less);
      std::swap(part[groups++], group[(len - 1) / 2]);
    }
    const std::size_t mid = (groups - 1) / 2;
    const std::size_t pivot_pos = mom_select(part.first(groups), mid, less);
    const std::size_t split = partition_around(part, pivot_pos, less);
    const std::size_t target = k - lo;
    if (target == split) return k;
    if (target < split) {
      hi = lo + split;
    } else {
      lo = lo + split + 1;
    }
  }
}

template <class T>
std::size_t random_select(std::span<Element<T>> a, std::size_t k, std::mt19937_64 rng,
                          CountingLess<T> less) {
  std::size_t lo = 0;
  std::size_t hi = a.size();
  while (hi - lo > 1) {
    auto part = a.subspan(lo, hi - lo);
    const std::size_t pivot_pos = static_cast<std::size_t>(rng() % part.size());
    const std::size_t split = partition_around(part, pivot_pos, less);
    const std::size_t target = k - lo;
    if (target == split) return k;
    if (target < split) {
      hi = lo + split;
    } else {
      lo = lo + split + 1;
    }
  }
  return k;
}

}  // namespace detail

/// Rearranges `scratch` and returns the element of 1-based rank k.
/// Comparisons are added to *comparisons when non-null.
template <ElementValue T>
Element<T> select_kth_inplace(std::span<Element<T>> scratch, std::size_t k,
                              const SelectionStrategy& strategy,
                              std::uint64_t* comparisons = nullptr) {
  if (k < 1 || k > scratch.size())
    throw std::out_of_range("select_kth: rank " + std::to_string(k) + " outside 1.." +
                            std::to_string(scratch.size()));
  detail::CountingLess<T> less{comparisons};
  std::size_t slot = 0;
  if (strategy.kind == SelectionStrategy::Kind::deterministic) {
    slot = detail::mom_select(scratch, k - 1, less);
  } else {
    slot = detail::random_select(scratch, k - 1, std::mt19937_64{strategy.seed}, less);
  }
  return scratch[slot];
}

template <ElementValue T>
Element<T> select_kth(std::span<const Element<T>> elements, std::size_t k,
                      const SelectionStrategy& strategy = {}, std::uint64_t* comparisons = nullptr) {
  std::vector<Element<T>> scratch(elements.begin(), elements.end());
  return select_kth_inplace<T>(scratch, k, strategy, comparisons);
}

template <ElementValue T>
struct Partition {
  std::vector<Element<T>> low;
  std::vector<Element<T>> high;
};

/// low = elements <= x, high = the rest; both keep the input order.
template <ElementValue T>
Partition<T> partition_stable(std::span<const Element<T>> elements, const Element<T>& x) {
  Partition<T> out;
  for (const auto& e : elements) {
    if (element_less(x, e)) {
      out.high.push_back(e);
    } else {
      out.low.push_back(e);
    }
  }
  return out;
}

}  // namespace rangesel
