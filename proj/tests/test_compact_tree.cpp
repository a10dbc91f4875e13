#include <gtest/gtest.h>

#include <bit>
#include <random>
#include <thread>
#include <vector>

#include "rangesel/cascade_tree.hpp"
#include "rangesel/compact_tree.hpp"

using namespace rangesel;

namespace {

const std::vector<double> kFig{3, 7, 5.5, 4, 9, 6.2, 9, 4, 2, 5};

std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

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

TEST(CompactTree, WorkedExampleDescent) {
  CompactTree<double> t(kFig);
  QueryTrace trace;
  const auto e = t.query(RangeQuery{3, 8, std::nullopt}, &trace);
  EXPECT_EQ(e.value, 5.5);
  EXPECT_EQ(e.index, 3U);
  ASSERT_GE(trace.steps.size(), 2U);
  EXPECT_EQ(trace.steps[0].low_count, 2U);
  EXPECT_FALSE(trace.steps[0].went_low);
  EXPECT_EQ(trace.steps[1].rank, 1U);
  // Local bounds in the high child: L - l = 3 - 1 and R - r = 8 - 3.
  EXPECT_EQ(trace.steps[1].left, 2U);
  EXPECT_EQ(trace.steps[1].right, 5U);
  EXPECT_EQ(trace.steps[1].node_size, 5U);
}

TEST(CompactTree, WorkedExampleRootBits) {
  CompactTree<double> t(kFig);
  EXPECT_EQ(t.node_values(t.root()).size(), 10U);
  t.split(t.root());
  EXPECT_TRUE(t.node_values(t.root()).empty());
  const std::vector<bool> expect{true, false, false, true, false, false, false, true, true, true};
  EXPECT_EQ(t.lowbits(t.root()), expect);
  EXPECT_EQ(t.lowbits_rank(t.root(), 2), 1U);
  EXPECT_EQ(t.lowbits_rank(t.root(), 8), 3U);
  const auto [lo, hi] = t.children(t.root());
  EXPECT_EQ(lo.size, 5U);
  EXPECT_EQ(hi.size, 5U);
  const std::vector<double> hi_vals{7, 5.5, 9, 6.2, 9};
  const auto hv = t.node_values(hi);
  EXPECT_TRUE(std::equal(hv.begin(), hv.end(), hi_vals.begin(), hi_vals.end()));
}

TEST(CompactTree, AgreesWithCascadeAndOracle) {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 1 + rng() % 1500;
    std::vector<double> a(n);
    for (auto& v : a) v = static_cast<double>(rng() % (round % 2 ? 4 : 100000)) / 4.0;
    const SelectionStrategy s{round % 3 ? SelectionStrategy::Kind::randomized : SelectionStrategy::Kind::deterministic,
                              static_cast<std::uint64_t>(round)};
    CompactTree<double> c(a, s);
    CascadeTree<double> d(a, s);
    c.set_verify_bounds(true);
    for (int q = 0; q < 150; ++q) {
      const auto rq = random_query(rng, n, q % 3 != 0);
      const auto want = oracle_select<double>(a, rq);
      ASSERT_EQ(c.query(rq), want);
      ASSERT_EQ(d.query(rq), want);
    }
  }
}

TEST(CompactTree, FullPayloadIsNTimesDepth) {
  std::mt19937_64 rng(42);
  std::vector<double> a(1024);
  for (auto& v : a) v = static_cast<double>(rng());
  CompactTree<double> t(a);
  t.build_eager();
  EXPECT_TRUE(t.complete());
  const auto rep = t.space_report();
  EXPECT_EQ(rep.payload_bits(), 10U * 1024U);
  ASSERT_EQ(rep.levels.size(), 10U);
  for (std::size_t j = 0; j < 10; ++j) {
    EXPECT_EQ(rep.levels[j].nodes, std::size_t{1} << j);
    EXPECT_EQ(rep.levels[j].payload_bits, 1024U);
  }
  EXPECT_EQ(rep.leaves, 1024U);
}

TEST(CompactTree, PayloadForOddSizes) {
  // Each level of a full build holds every element once, except levels below
  // the shallowest leaves.
  for (std::size_t n : {2U, 3U, 5U, 1000U, 1025U}) {
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<int>((i * 7919) % n);
    CompactTree<int> t(a);
    t.build_eager();
    std::size_t expect = 0;
    std::vector<std::size_t> level{n};
    while (!level.empty()) {
      std::vector<std::size_t> next;
      for (auto m : level) {
        if (m < 2) continue;
        expect += m;
        next.push_back((m + 1) / 2);
        next.push_back(m / 2);
      }
      level = std::move(next);
    }
    EXPECT_EQ(t.space_report().payload_bits(), expect) << n;
    EXPECT_EQ(t.space_report().levels.size(), ceil_log2(n));
  }
}

TEST(CompactTree, LazyNeverUsesMoreThanEager) {
  std::mt19937_64 rng(43);
  std::vector<double> a(1 << 14);
  for (auto& v : a) v = static_cast<double>(rng() % 1000);
  CompactTree<double> eager(a);
  eager.build_eager();
  const auto full = eager.space_report().total_bytes;
  CompactTree<double> lazy(a);
  std::size_t prev = 0;
  for (int q = 0; q < 3000; ++q) {
    lazy.query(random_query(rng, a.size(), false));
    if (q % 100 == 0) {
      const auto now = lazy.space_report().total_bytes;
      EXPECT_LE(now, full) << "after " << q << " queries";
      prev = now;
    }
  }
  EXPECT_GT(prev, 0U);
}

TEST(CompactTree, EagerBoundsAndShared) {
  std::mt19937_64 rng(44);
  std::vector<std::int64_t> a(4097);
  for (auto& v : a) v = static_cast<std::int64_t>(rng() % 50) - 25;
  CompactTree<std::int64_t> t(a);
  EXPECT_THROW(t.query_shared(RangeQuery{1, 5, std::nullopt}), std::logic_error);
  t.build_eager();
  const auto splits = t.stats().total_splits();
  EXPECT_EQ(splits, a.size() - 1);
  for (int q = 0; q < 500; ++q) {
    const auto rq = random_query(rng, a.size(), true);
    const auto before = t.stats().nodes_visited;
    ASSERT_EQ(t.query(rq), oracle_select<std::int64_t>(a, rq));
    EXPECT_LE(t.stats().nodes_visited - before, ceil_log2(a.size()) + 1);
    ASSERT_EQ(t.query_shared(rq), oracle_select<std::int64_t>(a, rq));
  }
  EXPECT_EQ(t.stats().total_splits(), splits);
}

TEST(CompactTree, ConcurrentSharedQueries) {
  std::mt19937_64 rng(45);
  std::vector<double> a(30000);
  for (auto& v : a) v = static_cast<double>(rng() % 3000);
  CompactTree<double> t(a);
  t.build_eager();
  std::vector<RangeQuery> qs;
  for (int i = 0; i < 300; ++i) qs.push_back(random_query(rng, a.size(), true));
  std::vector<Element<double>> expect;
  for (const auto& q : qs) expect.push_back(oracle_select<double>(a, q));
  std::vector<int> bad(4, 0);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = 0; i < qs.size(); ++i) bad[w] += !(t.query_shared(qs[i]) == expect[i]);
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(bad, std::vector<int>(4, 0));
}

TEST(CompactTree, SingletonAndErrors) {
  const std::vector<int> one{5};
  CompactTree<int> t(one);
  EXPECT_TRUE(t.complete());
  EXPECT_EQ(t.query(RangeQuery{1, 1, std::nullopt}).value, 5);
  EXPECT_THROW(t.query(RangeQuery{1, 2, std::nullopt}), std::out_of_range);
  EXPECT_THROW(CompactTree<int>(std::vector<int>{}), std::invalid_argument);
}
