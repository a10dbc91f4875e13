#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <random>
#include <thread>
#include <vector>

#include "rangesel/cascade_tree.hpp"

using namespace rangesel;

namespace {

const std::vector<double> kFig{3, 7, 5.5, 4, 9, 6.2, 9, 4, 2, 5};

std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

template <class T>
RangeQuery random_query(std::mt19937_64& rng, std::size_t n, bool with_rank) {
  std::uniform_int_distribution<std::size_t> pos(1, n);
  std::size_t l = pos(rng);
  std::size_t r = pos(rng);
  if (l > r) std::swap(l, r);
  RangeQuery q{l, r, std::nullopt};
  if (with_rank) q.rank = std::uniform_int_distribution<std::size_t>(1, r - l + 1)(rng);
  return q;
}

}  // namespace

TEST(CascadeTree, WorkedExampleDescent) {
  CascadeTree<double> t(kFig);
  QueryTrace trace;
  const auto e = t.query(RangeQuery{3, 8, std::nullopt}, &trace);
  EXPECT_EQ(e.value, 5.5);
  EXPECT_EQ(e.index, 3U);
  ASSERT_GE(trace.steps.size(), 2U);
  EXPECT_EQ(trace.steps[0].node_size, 10U);
  EXPECT_EQ(trace.steps[0].rank, 3U);
  EXPECT_EQ(trace.steps[0].low_count, 2U);
  EXPECT_EQ(6U - trace.steps[0].low_count, 4U);
  EXPECT_FALSE(trace.steps[0].went_low);
  EXPECT_EQ(trace.steps[1].rank, 1U);
  EXPECT_EQ(trace.steps.size(), ceil_log2(10));
}

TEST(CascadeTree, WorkedExampleRootTables) {
  CascadeTree<double> t(kFig);
  t.split(t.root());
  const auto root = t.node(t.root());
  const std::vector<std::uint32_t> low{1, 1, 1, 2, 2, 2, 2, 3, 4, 5};
  const std::vector<std::uint32_t> high{0, 1, 2, 2, 3, 4, 5, 5, 5, 5};
  EXPECT_TRUE(std::equal(root.low_pred.begin(), root.low_pred.end(), low.begin(), low.end()));
  EXPECT_TRUE(std::equal(root.high_pred.begin(), root.high_pred.end(), high.begin(), high.end()));
  const auto lo = t.node(*root.low);
  const std::vector<double> lo_vals{3, 4, 4, 2, 5};
  const std::vector<std::uint32_t> lo_idx{1, 4, 8, 9, 10};
  EXPECT_TRUE(std::equal(lo.values.begin(), lo.values.end(), lo_vals.begin(), lo_vals.end()));
  EXPECT_TRUE(std::equal(lo.indices.begin(), lo.indices.end(), lo_idx.begin(), lo_idx.end()));
  EXPECT_THROW(t.split(t.root()), std::logic_error);
}

TEST(CascadeTree, PointQueriesAndSingleton) {
  CascadeTree<double> t(kFig);
  for (std::size_t i = 1; i <= kFig.size(); ++i) {
    const auto e = t.query(RangeQuery{i, i, std::nullopt});
    EXPECT_EQ(e.value, kFig[i - 1]);
    EXPECT_EQ(e.index, i);
  }
  const std::vector<int> one{42};
  CascadeTree<int> s(one);
  EXPECT_TRUE(s.complete());
  EXPECT_EQ(s.query(RangeQuery{1, 1, std::nullopt}).value, 42);
  EXPECT_THROW(CascadeTree<int>(std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(t.query(RangeQuery{0, 2, std::nullopt}), std::out_of_range);
}

TEST(CascadeTree, RandomQueriesMatchOracle) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 1 + rng() % 600;
    std::vector<int> a(n);
    const int range = round % 3 == 0 ? 3 : 1000;
    for (auto& v : a) v = static_cast<int>(rng() % range);
    const SelectionStrategy s{round % 2 ? SelectionStrategy::Kind::deterministic : SelectionStrategy::Kind::randomized,
                              static_cast<std::uint64_t>(round)};
    CascadeTree<int> t(a, s);
    t.set_verify_cascade(true);
    for (int q = 0; q < 200; ++q) {
      const auto rq = random_query<int>(rng, n, q % 2 == 0);
      ASSERT_EQ(t.query(rq), oracle_select<int>(a, rq));
    }
  }
}

TEST(CascadeTree, LazySplitsPerLevel) {
  std::mt19937_64 rng(32);
  const std::size_t n = 5000;
  std::vector<double> a(n);
  for (auto& v : a) v = static_cast<double>(rng() % 100000);
  for (std::size_t k : {0U, 1U, 3U, 10U, 77U, 400U}) {
    CascadeTree<double> t(a);
    for (std::size_t q = 0; q < k; ++q) t.query(random_query<double>(rng, n, false));
    const auto& st = t.stats();
    if (k == 0) {
      EXPECT_EQ(st.total_splits(), 0U);
      EXPECT_EQ(st.elements_partitioned, 0U);
      continue;
    }
    std::uint64_t bound = 0;
    for (std::size_t j = 0; j < st.splits_per_level.size(); ++j) {
      const std::uint64_t cap = std::min<std::uint64_t>(std::uint64_t{1} << j, k);
      EXPECT_LE(st.splits_per_level[j], cap) << "level " << j;
      bound += cap * ((n + (std::size_t{1} << j) - 1) >> j);
    }
    EXPECT_LE(st.elements_partitioned, bound);
    EXPECT_LE(st.elements_partitioned, n * (ceil_log2(k) + 2));
    EXPECT_LE(st.cascade_steps, 2 * ceil_log2(n) * k);
  }
}

TEST(CascadeTree, SplitShapeInvariants) {
  std::mt19937_64 rng(33);
  std::vector<int> a(777);
  for (auto& v : a) v = static_cast<int>(rng() % 20);
  CascadeTree<int> t(a);
  t.build_eager();
  EXPECT_TRUE(t.complete());
  EXPECT_EQ(t.node_count(), 2 * a.size() - 1);
  std::vector<CascadeTree<int>::NodeId> stack{t.root()};
  while (!stack.empty()) {
    const auto v = t.node(stack.back());
    stack.pop_back();
    ASSERT_TRUE(std::is_sorted(v.indices.begin(), v.indices.end()));
    if (v.values.size() < 2) continue;
    ASSERT_TRUE(v.low && v.high);
    const auto lo = t.node(*v.low);
    const auto hi = t.node(*v.high);
    ASSERT_EQ(lo.values.size(), (v.values.size() + 1) / 2);
    ASSERT_EQ(hi.values.size(), v.values.size() / 2);
    Element<int> max_low{lo.values[0], lo.indices[0]};
    for (std::size_t i = 0; i < lo.values.size(); ++i)
      max_low = std::max(max_low, Element<int>{lo.values[i], lo.indices[i]}, element_less<int>);
    for (std::size_t i = 0; i < hi.values.size(); ++i)
      ASSERT_TRUE(element_less(max_low, Element<int>{hi.values[i], hi.indices[i]}));
    for (std::size_t j = 0; j < v.values.size(); ++j) ASSERT_EQ(v.low_pred[j] + v.high_pred[j], j + 1);
    stack.push_back(*v.low);
    stack.push_back(*v.high);
  }
}

TEST(CascadeTree, EagerQueriesAreShallowAndSplitFree) {
  std::mt19937_64 rng(34);
  const std::size_t n = 3000;
  std::vector<double> a(n);
  for (auto& v : a) v = static_cast<double>(rng() % 500);
  CascadeTree<double> t(a);
  const auto lazy_bytes = t.memory_bytes();
  t.build_eager();
  EXPECT_GE(t.memory_bytes(), lazy_bytes);
  const auto splits = t.stats().total_splits();
  for (int q = 0; q < 500; ++q) {
    const auto before = t.stats().nodes_visited;
    const auto rq = random_query<double>(rng, n, true);
    EXPECT_EQ(t.query(rq), t.query_shared(rq));
    EXPECT_LE(t.stats().nodes_visited - before, ceil_log2(n) + 1);
  }
  EXPECT_EQ(t.stats().total_splits(), splits);
}

TEST(CascadeTree, SharedQueryNeedsCompleteTree) {
  CascadeTree<double> t(kFig);
  EXPECT_THROW(t.query_shared(RangeQuery{1, 10, std::nullopt}), std::logic_error);
}

TEST(CascadeTree, ConcurrentSharedQueries) {
  std::mt19937_64 rng(35);
  std::vector<int> a(20000);
  for (auto& v : a) v = static_cast<int>(rng() % 1000);
  CascadeTree<int> t(a);
  t.build_eager();
  std::vector<RangeQuery> qs;
  for (int i = 0; i < 400; ++i) qs.push_back(random_query<int>(rng, a.size(), true));
  std::vector<Element<int>> expect;
  for (const auto& q : qs) expect.push_back(oracle_select<int>(a, q));
  std::vector<int> bad(4, 0);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = 0; i < qs.size(); ++i) bad[w] += !(t.query_shared(qs[i]) == expect[i]);
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(bad, std::vector<int>(4, 0));
}
