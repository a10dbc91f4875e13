#include "rangesel/order_index.hpp"

#include <stdexcept>

namespace rangesel {

namespace {

// Range of 2^i tags may hold at most (2/T)^i groups, with T = 1.5.
constexpr double kDensityBase = 4.0 / 3.0;

}  // namespace

OrderIndex::Id OrderIndex::new_item() {
  Id id;
  if (!free_items_.empty()) {
    id = free_items_.back();
    free_items_.pop_back();
    items_[id] = Item{};
  } else {
    if (items_.size() >= kNil) throw std::length_error("OrderIndex: too many items");
    id = static_cast<Id>(items_.size());
    items_.emplace_back();
  }
  items_[id].live = true;
  ++size_;
  return id;
}

std::uint32_t OrderIndex::new_group() {
  std::uint32_t g;
  if (!free_groups_.empty()) {
    g = free_groups_.back();
    free_groups_.pop_back();
    groups_[g] = Group{};
  } else {
    g = static_cast<std::uint32_t>(groups_.size());
    groups_.emplace_back();
  }
  groups_[g].live = true;
  return g;
}

OrderIndex::Id OrderIndex::group_last(std::uint32_t g) const noexcept {
  Id x = groups_[g].head;
  for (std::uint32_t i = 1; i < groups_[g].count; ++i) x = items_[x].next;
  return x;
}

void OrderIndex::renumber(std::uint32_t g) {
  Group& grp = groups_[g];
  const Tag spacing = kTagLimit / (Tag{grp.count} + 1);
  Id x = grp.head;
  for (std::uint32_t i = 0; i < grp.count; ++i) {
    items_[x].tag = spacing * (Tag{i} + 1);
    x = items_[x].next;
  }
  relabels_ += grp.count;
}

std::uint32_t OrderIndex::insert_group_after(std::uint32_t g) {
  const std::uint32_t nx = g == kNil ? first_group_ : groups_[g].next;
  const Tag lo = g == kNil ? 0 : groups_[g].tag;
  const Tag hi = nx == kNil ? kTagLimit : groups_[nx].tag;

  const std::uint32_t fresh = new_group();
  auto link = [&] {
    groups_[fresh].prev = g;
    groups_[fresh].next = nx;
    if (g == kNil) {
      first_group_ = fresh;
    } else {
      groups_[g].next = fresh;
    }
    if (nx != kNil) groups_[nx].prev = fresh;
  };

  if (hi - lo >= 2) {
    groups_[fresh].tag = lo + (hi - lo) / 2;
    link();
    return fresh;
  }

  // Relabel the smallest aligned tag range around `base` that is sparse enough.
  const std::uint32_t base = g == kNil ? first_group_ : g;
  const Tag base_tag = groups_[base].tag;
  double capacity = 1.0;
  for (unsigned i = 1; i <= 62; ++i) {
    capacity *= kDensityBase;
    const Tag width = Tag{1} << i;
    const Tag range_lo = base_tag & ~(width - 1);
    const Tag range_hi = range_lo + width;
    std::uint32_t first = base;
    std::size_t count = 1;
    while (groups_[first].prev != kNil && groups_[groups_[first].prev].tag >= range_lo) {
      first = groups_[first].prev;
      ++count;
    }
    for (std::uint32_t y = groups_[base].next; y != kNil && groups_[y].tag < range_hi;
         y = groups_[y].next)
      ++count;
    if (static_cast<double>(count + 1) > capacity) continue;

    link();
    const Tag spacing = width / (Tag{count} + 2);
    std::uint32_t y = g == kNil ? fresh : first;
    for (std::size_t j = 0; j <= count; ++j) {
      groups_[y].tag = range_lo + spacing * (Tag{j} + 1);
      y = groups_[y].next;
    }
    relabels_ += count;
    return fresh;
  }
  throw std::length_error("OrderIndex: tag space exhausted");
}

void OrderIndex::unlink_group(std::uint32_t g) {
  Group& grp = groups_[g];
  if (grp.prev != kNil) {
    groups_[grp.prev].next = grp.next;
  } else {
    first_group_ = grp.next;
  }
  if (grp.next != kNil) groups_[grp.next].prev = grp.prev;
  grp.live = false;
  free_groups_.push_back(g);
}

void OrderIndex::split_group(std::uint32_t g) {
  const std::uint32_t keep = groups_[g].count / 2;
  const std::uint32_t other = insert_group_after(g);
  Id x = groups_[g].head;
  for (std::uint32_t i = 0; i < keep; ++i) x = items_[x].next;
  groups_[other].head = x;
  groups_[other].count = groups_[g].count - keep;
  groups_[g].count = keep;
  for (std::uint32_t i = 0; i < groups_[other].count; ++i) {
    items_[x].group = other;
    x = items_[x].next;
  }
  renumber(g);
  renumber(other);
}

OrderIndex::Id OrderIndex::insert_front() {
  const Id id = new_item();
  if (head_ == kNil) {
    const std::uint32_t g = insert_group_after(kNil);
    groups_[g].head = id;
    groups_[g].count = 1;
    items_[id].group = g;
    items_[id].tag = kTagLimit / 2;
    head_ = tail_ = id;
    return id;
  }
  const Id b = head_;
  const std::uint32_t g = items_[b].group;
  if (items_[b].tag < 2) renumber(g);
  items_[id].group = g;
  items_[id].tag = items_[b].tag / 2;
  items_[id].next = b;
  items_[b].prev = id;
  head_ = id;
  groups_[g].head = id;
  if (++groups_[g].count > kMaxGroup) split_group(g);
  return id;
}

OrderIndex::Id OrderIndex::insert_after(Id after) {
  if (!live(after)) throw std::invalid_argument("OrderIndex::insert_after: dead item");
  const Id id = new_item();
  const std::uint32_t g = items_[after].group;
  auto upper = [&] {
    const Id nx = items_[after].next;
    return nx != kNil && items_[nx].group == g ? items_[nx].tag : kTagLimit;
  };
  if (upper() - items_[after].tag < 2) renumber(g);
  const Tag lo = items_[after].tag;
  items_[id].group = g;
  items_[id].tag = lo + (upper() - lo) / 2;
  const Id nx = items_[after].next;
  items_[id].prev = after;
  items_[id].next = nx;
  items_[after].next = id;
  if (nx != kNil) {
    items_[nx].prev = id;
  } else {
    tail_ = id;
  }
  if (++groups_[g].count > kMaxGroup) split_group(g);
  return id;
}

void OrderIndex::erase(Id id) {
  if (!live(id)) throw std::invalid_argument("OrderIndex::erase: dead item");
  Item& x = items_[id];
  const std::uint32_t g = x.group;
  if (x.prev != kNil) {
    items_[x.prev].next = x.next;
  } else {
    head_ = x.next;
  }
  if (x.next != kNil) {
    items_[x.next].prev = x.prev;
  } else {
    tail_ = x.prev;
  }
  Group& grp = groups_[g];
  if (grp.head == id) grp.head = x.next != kNil && items_[x.next].group == g ? x.next : kNil;
  if (--grp.count == 0) unlink_group(g);
  x.live = false;
  free_items_.push_back(id);
  --size_;
}

void OrderIndex::audit() const {
  std::size_t seen = 0;
  Id prev = kNil;
  std::uint32_t group = kNil;
  std::uint32_t in_group = 0;
  for (Id x = head_; x != kNil; x = items_[x].next) {
    const Item& it = items_[x];
    if (!it.live) throw std::logic_error("OrderIndex: dead item linked");
    if (it.prev != prev) throw std::logic_error("OrderIndex: broken prev link");
    if (prev != kNil && compare(prev, x) >= 0) throw std::logic_error("OrderIndex: tags out of order");
    if (it.group != group) {
      if (group != kNil && in_group != groups_[group].count)
        throw std::logic_error("OrderIndex: group count mismatch");
      if (groups_[it.group].head != x) throw std::logic_error("OrderIndex: group head mismatch");
      if (group != kNil && groups_[group].next != it.group)
        throw std::logic_error("OrderIndex: group list out of order");
      group = it.group;
      in_group = 0;
    }
    ++in_group;
    ++seen;
    prev = x;
  }
  if (group != kNil && in_group != groups_[group].count)
    throw std::logic_error("OrderIndex: group count mismatch");
  if (prev != tail_) throw std::logic_error("OrderIndex: tail mismatch");
  if (seen != size_) throw std::logic_error("OrderIndex: size mismatch");
}

}  // namespace rangesel
