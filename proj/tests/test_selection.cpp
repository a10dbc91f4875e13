#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rangesel/selection.hpp"

using namespace rangesel;

namespace {

std::vector<Element<int>> random_elements(std::mt19937_64& rng, std::size_t n, int range) {
  std::uniform_int_distribution<int> val(0, range);
  std::vector<Element<int>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {val(rng), static_cast<std::uint32_t>(i + 1)};
  return out;
}

const SelectionStrategy kStrategies[] = {
    {SelectionStrategy::Kind::deterministic, 0},
    {SelectionStrategy::Kind::randomized, 0},
    {SelectionStrategy::Kind::randomized, 99},
};

}  // namespace

TEST(Selection, EveryRankMatchesSort) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1U, 2U, 5U, 10U, 11U, 37U, 100U}) {
    auto elems = random_elements(rng, n, 5);
    auto sorted = elems;
    std::sort(sorted.begin(), sorted.end(), element_less<int>);
    for (const auto& s : kStrategies) {
      for (std::size_t k = 1; k <= n; ++k) EXPECT_EQ(select_kth<int>(elems, k, s), sorted[k - 1]);
    }
  }
}

TEST(Selection, LargeInputsBothStrategies) {
  std::mt19937_64 rng(2);
  for (int range : {0, 3, 1000000}) {
    auto elems = random_elements(rng, 20000, range);
    auto sorted = elems;
    std::sort(sorted.begin(), sorted.end(), element_less<int>);
    for (const auto& s : kStrategies) {
      for (std::size_t k : {1U, 777U, 10000U, 19999U, 20000U}) EXPECT_EQ(select_kth<int>(elems, k, s), sorted[k - 1]);
    }
  }
}

TEST(Selection, RejectsBadRank) {
  std::vector<Element<int>> e{{1, 1}, {2, 2}};
  EXPECT_THROW(select_kth<int>(e, 0), std::out_of_range);
  EXPECT_THROW(select_kth<int>(e, 3), std::out_of_range);
  std::vector<Element<int>> none;
  EXPECT_THROW(select_kth<int>(none, 1), std::out_of_range);
}

TEST(Selection, DeterministicComparisonsAreLinear) {
  std::mt19937_64 rng(3);
  const SelectionStrategy mom{SelectionStrategy::Kind::deterministic, 0};
  for (std::size_t n : {1000U, 10000U, 100000U}) {
    auto elems = random_elements(rng, n, 1 << 30);
    std::uint64_t cmp = 0;
    select_kth<int>(elems, (n + 1) / 2, mom, &cmp);
    EXPECT_LE(cmp, 40 * n) << "n=" << n;
    EXPECT_GE(cmp, n - 1);
  }
  // Sorted and reversed inputs stay linear as well.
  std::vector<Element<int>> asc(50000);
  for (std::size_t i = 0; i < asc.size(); ++i) asc[i] = {static_cast<int>(i), static_cast<std::uint32_t>(i + 1)};
  auto desc = asc;
  std::reverse(desc.begin(), desc.end());
  for (const auto* v : {&asc, &desc}) {
    std::uint64_t cmp = 0;
    select_kth<int>(*v, 25000, mom, &cmp);
    EXPECT_LE(cmp, 40U * 50000U);
  }
}

TEST(Selection, SeededRandomIsReproducible) {
  std::mt19937_64 rng(4);
  auto elems = random_elements(rng, 5000, 100);
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  const SelectionStrategy s{SelectionStrategy::Kind::randomized, 42};
  EXPECT_EQ(select_kth<int>(elems, 2500, s, &a), select_kth<int>(elems, 2500, s, &b));
  EXPECT_EQ(a, b);
}

TEST(Selection, PartitionStableKeepsOrder) {
  std::vector<Element<double>> e{{3, 1}, {7, 2}, {5.5, 3}, {4, 4}, {9, 5}, {6.2, 6}, {9, 7}, {4, 8}, {2, 9}, {5, 10}};
  const auto part = partition_stable<double>(e, Element<double>{5, 10});
  ASSERT_EQ(part.low.size(), 5U);
  ASSERT_EQ(part.high.size(), 5U);
  const std::vector<std::uint32_t> low_idx{1, 4, 8, 9, 10};
  const std::vector<std::uint32_t> high_idx{2, 3, 5, 6, 7};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(part.low[i].index, low_idx[i]);
    EXPECT_EQ(part.high[i].index, high_idx[i]);
  }
}

TEST(Selection, MixSeedSpreads) {
  EXPECT_NE(mix_seed(0), mix_seed(1));
  EXPECT_NE(mix_seed(1), mix_seed(2));
  EXPECT_EQ(mix_seed(12345), mix_seed(12345));
}
