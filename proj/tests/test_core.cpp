#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rangesel/core.hpp"

using namespace rangesel;

TEST(TotalOrder, ValueThenIndex) {
  EXPECT_TRUE(element_less(Element<double>{1.0, 9}, Element<double>{2.0, 1}));
  EXPECT_TRUE(element_less(Element<double>{4.0, 4}, Element<double>{4.0, 8}));
  EXPECT_FALSE(element_less(Element<double>{4.0, 8}, Element<double>{4.0, 4}));
  EXPECT_EQ(total_cmp(Element<int>{3, 2}, Element<int>{3, 2}), std::strong_ordering::equal);
  EXPECT_EQ(total_cmp(Element<int>{3, 1}, Element<int>{3, 2}), std::strong_ordering::less);
  EXPECT_EQ(total_cmp(Element<int>{5, 1}, Element<int>{3, 2}), std::strong_ordering::greater);
}

TEST(MedianRank, LowerMedian) {
  EXPECT_EQ(median_rank(1), 1U);
  EXPECT_EQ(median_rank(2), 1U);
  EXPECT_EQ(median_rank(6), 3U);
  EXPECT_EQ(median_rank(9), 5U);
  EXPECT_THROW(median_rank(0), std::invalid_argument);
}

TEST(RangeQuery, Validation) {
  RangeQuery q{3, 8, std::nullopt};
  EXPECT_NO_THROW(q.validate(10));
  EXPECT_EQ(q.length(), 6U);
  EXPECT_EQ(q.resolved_rank(), 3U);
  EXPECT_THROW((RangeQuery{0, 3, std::nullopt}.validate(10)), std::out_of_range);
  EXPECT_THROW((RangeQuery{5, 4, std::nullopt}.validate(10)), std::out_of_range);
  EXPECT_THROW((RangeQuery{1, 11, std::nullopt}.validate(10)), std::out_of_range);
  EXPECT_THROW((RangeQuery{1, 3, 4}.validate(10)), std::out_of_range);
  EXPECT_THROW((RangeQuery{1, 3, 0}.validate(10)), std::out_of_range);
  EXPECT_NO_THROW((RangeQuery{1, 3, 3}.validate(10)));
}

TEST(OracleSelect, WorkedExample) {
  const std::vector<double> a{3, 7, 5.5, 4, 9, 6.2, 9, 4, 2, 5};
  const auto e = oracle_select<double>(a, RangeQuery{3, 8, std::nullopt});
  EXPECT_EQ(e.value, 5.5);
  EXPECT_EQ(e.index, 3U);
  EXPECT_EQ(oracle_select<double>(a, RangeQuery{6, 6, std::nullopt}).value, 6.2);
  EXPECT_EQ(oracle_select<double>(a, RangeQuery{1, 10, std::nullopt}).value, 5.0);
  // Equal values resolve by position.
  const auto hi = oracle_select<double>(a, RangeQuery{1, 10, 10});
  EXPECT_EQ(hi.value, 9.0);
  EXPECT_EQ(hi.index, 7U);
  EXPECT_EQ(oracle_select<double>(a, RangeQuery{1, 10, 9}).index, 5U);
}

TEST(OracleSelect, MatchesCountingDefinition) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> val(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> a(1 + trial % 40);
    for (auto& v : a) v = val(rng);
    std::uniform_int_distribution<std::size_t> pos(1, a.size());
    std::size_t l = pos(rng);
    std::size_t r = pos(rng);
    if (l > r) std::swap(l, r);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, r - l + 1)(rng);
    const auto e = oracle_select<int>(a, RangeQuery{l, r, p});
    // Exactly p-1 range elements precede e in the (value, index) order.
    std::size_t before = 0;
    for (std::size_t i = l; i <= r; ++i)
      before += element_less(Element<int>{a[i - 1], static_cast<std::uint32_t>(i)}, e);
    EXPECT_EQ(before, p - 1);
    EXPECT_EQ(a[e.index - 1], e.value);
  }
}

TEST(CheckOrderable, RejectsNaN) {
  const std::vector<double> ok{1.0, -std::numeric_limits<double>::infinity()};
  EXPECT_NO_THROW(check_orderable<double>(ok));
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(check_orderable<double>(bad), std::invalid_argument);
}

TEST(StatsCounters, Accumulate) {
  Stats a;
  a.record_split(0, 10);
  a.record_split(1, 5);
  a.record_split(1, 5);
  EXPECT_EQ(a.total_splits(), 3U);
  EXPECT_EQ(a.elements_partitioned, 20U);
  Stats b;
  b.record_split(3, 2);
  b.comparisons = 4;
  a += b;
  ASSERT_EQ(a.splits_per_level.size(), 4U);
  EXPECT_EQ(a.splits_per_level[1], 2U);
  EXPECT_EQ(a.splits_per_level[3], 1U);
  EXPECT_EQ(a.comparisons, 4U);
}
