#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "rangesel/order_index.hpp"

using namespace rangesel;

namespace {

void expect_matches(const OrderIndex& idx, const std::vector<OrderIndex::Id>& shadow) {
  idx.audit();
  ASSERT_EQ(idx.size(), shadow.size());
  std::vector<OrderIndex::Id> walked;
  for (auto x = idx.first(); x != OrderIndex::kNil; x = idx.next(x)) walked.push_back(x);
  ASSERT_EQ(walked, shadow);
  for (std::size_t i = 1; i < shadow.size(); ++i) ASSERT_TRUE(idx.precedes(shadow[i - 1], shadow[i]));
}

}  // namespace

TEST(OrderIndex, RandomEditsMatchShadowList) {
  std::mt19937_64 rng(51);
  OrderIndex idx;
  std::vector<OrderIndex::Id> shadow;
  for (int op = 0; op < 20000; ++op) {
    const auto c = rng() % 10;
    if (shadow.empty() || c < 5) {
      const std::size_t at = rng() % (shadow.size() + 1);
      const auto id = at == 0 ? idx.insert_front() : idx.insert_after(shadow[at - 1]);
      shadow.insert(shadow.begin() + static_cast<std::ptrdiff_t>(at), id);
    } else if (c < 8) {
      const std::size_t at = rng() % shadow.size();
      idx.erase(shadow[at]);
      shadow.erase(shadow.begin() + static_cast<std::ptrdiff_t>(at));
    } else {
      const std::size_t a = rng() % shadow.size();
      const std::size_t b = rng() % shadow.size();
      const int want = a < b ? -1 : (a > b ? 1 : 0);
      ASSERT_EQ(idx.compare(shadow[a], shadow[b]), want);
    }
    if (op % 2000 == 0) expect_matches(idx, shadow);
  }
  expect_matches(idx, shadow);
}

TEST(OrderIndex, HammeringOnePointForcesRelabels) {
  OrderIndex idx;
  std::vector<OrderIndex::Id> shadow{idx.insert_front()};
  const auto anchor = shadow[0];
  // Always insert right after the anchor: tags between anchor and its
  // successor halve each time.
  for (int i = 0; i < 50000; ++i) shadow.insert(shadow.begin() + 1, idx.insert_after(anchor));
  expect_matches(idx, shadow);
  EXPECT_GT(idx.relabels(), 0U);
  EXPECT_LE(idx.relabels(), 50000U * 64U);
}

TEST(OrderIndex, HammeringFront) {
  OrderIndex idx;
  std::vector<OrderIndex::Id> shadow;
  for (int i = 0; i < 30000; ++i) shadow.insert(shadow.begin(), idx.insert_front());
  expect_matches(idx, shadow);
}

TEST(OrderIndex, AppendOnlyAndDrain) {
  OrderIndex idx;
  std::vector<OrderIndex::Id> shadow{idx.insert_front()};
  for (int i = 0; i < 30000; ++i) shadow.push_back(idx.insert_after(shadow.back()));
  expect_matches(idx, shadow);
  while (!shadow.empty()) {
    idx.erase(shadow.back());
    shadow.pop_back();
    if (shadow.size() % 4999 == 0) expect_matches(idx, shadow);
  }
  EXPECT_EQ(idx.size(), 0U);
  EXPECT_EQ(idx.first(), OrderIndex::kNil);
  const auto fresh = idx.insert_front();
  expect_matches(idx, {fresh});
}

TEST(OrderIndex, DeadItemsRejected) {
  OrderIndex idx;
  const auto a = idx.insert_front();
  idx.erase(a);
  EXPECT_FALSE(idx.live(a));
  EXPECT_THROW(idx.erase(a), std::invalid_argument);
  EXPECT_THROW(idx.insert_after(a), std::invalid_argument);
  EXPECT_THROW(idx.insert_after(12345), std::invalid_argument);
}

TEST(OrderIndex, CompareIsTransitive) {
  std::mt19937_64 rng(52);
  OrderIndex idx;
  std::vector<OrderIndex::Id> shadow;
  for (int i = 0; i < 3000; ++i) {
    const std::size_t at = rng() % (shadow.size() + 1);
    shadow.insert(shadow.begin() + static_cast<std::ptrdiff_t>(at),
                  at == 0 ? idx.insert_front() : idx.insert_after(shadow[at - 1]));
  }
  auto sorted = shadow;
  std::shuffle(sorted.begin(), sorted.end(), rng);
  std::sort(sorted.begin(), sorted.end(), [&](auto a, auto b) { return idx.precedes(a, b); });
  EXPECT_EQ(sorted, shadow);
}
