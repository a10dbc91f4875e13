#pragma once

// List-order maintenance: every item of a linked list carries a tag pair
// (group tag, local tag) such that list order equals tag order, so any two
// live items compare in O(1).
//
// Items are grouped into runs of at most kMaxGroup consecutive items. Local
// tags are renumbered inside a group when a gap closes; groups split when
// full. Group tags are maintained by density-based relabeling of the smallest
// enclosing tag range that is sparse enough, which is amortized O(log g) per
// group insertion and therefore O(1) amortized per item insertion.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace rangesel {

class OrderIndex {
 public:
  using Id = std::uint32_t;
  static constexpr Id kNil = std::numeric_limits<Id>::max();
  static constexpr std::size_t kMaxGroup = 64;

  Id insert_front();
  Id insert_after(Id after);
  void erase(Id id);

  /// Negative, zero or positive as a precedes, equals or follows b.
  int compare(Id a, Id b) const noexcept {
    const Item& x = items_[a];
    const Item& y = items_[b];
    if (x.group != y.group) return groups_[x.group].tag < groups_[y.group].tag ? -1 : 1;
    if (x.tag == y.tag) return 0;
    return x.tag < y.tag ? -1 : 1;
  }
  bool precedes(Id a, Id b) const noexcept { return compare(a, b) < 0; }

  bool live(Id id) const noexcept { return id < items_.size() && items_[id].live; }
  std::size_t size() const noexcept { return size_; }
  Id first() const noexcept { return head_; }
  Id last() const noexcept { return tail_; }
  Id next(Id id) const noexcept { return items_[id].next; }
  Id prev(Id id) const noexcept { return items_[id].prev; }

  /// Tag reassignments performed so far (local renumbering + group relabeling).
  std::uint64_t relabels() const noexcept { return relabels_; }

  /// Checks tag monotonicity and link consistency; throws std::logic_error.
  void audit() const;

 private:
  using Tag = std::uint64_t;
  static constexpr Tag kTagLimit = Tag{1} << 62;

  struct Item {
    Tag tag = 0;
    std::uint32_t group = 0;
    Id prev = kNil;
    Id next = kNil;
    bool live = false;
  };

  struct Group {
    Tag tag = 0;
    std::uint32_t prev = kNil;
    std::uint32_t next = kNil;
    Id head = kNil;
    std::uint32_t count = 0;
    bool live = false;
  };

  Id new_item();
  std::uint32_t new_group();
  std::uint32_t insert_group_after(std::uint32_t g);  // kNil => at the front
  void renumber(std::uint32_t g);
  void split_group(std::uint32_t g);
  void unlink_group(std::uint32_t g);
  Id group_last(std::uint32_t g) const noexcept;

  std::vector<Item> items_;
  std::vector<Id> free_items_;
  std::vector<Group> groups_;
  std::vector<std::uint32_t> free_groups_;
  std::uint32_t first_group_ = kNil;
  Id head_ = kNil;
  Id tail_ = kNil;
  std::size_t size_ = 0;
  std::uint64_t relabels_ = 0;
};

}  // namespace rangesel
