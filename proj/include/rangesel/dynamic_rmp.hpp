#pragma once

// Range selection over a mutable list.
//
// Primary structure: a weight-balanced BB(alpha) search tree over the live
// elements keyed by (value, insertion sequence). Each primary node owns a
// secondary search tree over the elements of its primary subtree, ordered by
// list position and augmented with subtree sizes, so the number of subtree
// elements inside a handle range costs two O(log n) rank searches. Positions
// compare in O(1) through an OrderIndex.
//
// A primary subtree whose balance breaks after an update is rebuilt from
// scratch together with all of its secondary trees. Every other update touches
// only the secondary trees on one root-to-leaf path.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rangesel/core.hpp"
#include "rangesel/order_index.hpp"

namespace rangesel {

/// Stable identity of one list element; invalid after erase.
struct ElementHandle {
  std::uint32_t slot = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t generation = 0;

  friend bool operator==(const ElementHandle&, const ElementHandle&) = default;
};

template <ElementValue T>
class DynamicRmp {
 public:
  using NodeId = std::uint32_t;

  explicit DynamicRmp(double alpha = 0.25) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0 / 3.0))
      throw std::invalid_argument("DynamicRmp: alpha must lie in (0, 1/3]");
  }

  std::size_t size() const noexcept { return order_.size(); }
  bool empty() const noexcept { return size() == 0; }
  double alpha() const noexcept { return alpha_; }
  const Stats& stats() const noexcept { return stats_; }

  bool live(ElementHandle h) const noexcept {
    return h.slot < elems_.size() && elems_[h.slot].live && elems_[h.slot].generation == h.generation;
  }

  T value(ElementHandle h) const {
    check_live(h, "value");
    return elems_[h.slot].value;
  }

  /// Negative, zero or positive as a precedes, equals or follows b in the list.
  int compare_positions(ElementHandle a, ElementHandle b) const {
    check_live(a, "compare_positions");
    check_live(b, "compare_positions");
    return order_.compare(elems_[a.slot].order, elems_[b.slot].order);
  }

  /// Inserts `value` right after `after`, or at the front when `after` is empty.
  ElementHandle insert_after(std::optional<ElementHandle> after, T value) {
    if constexpr (std::is_floating_point_v<T>) {
      if (value != value) throw std::invalid_argument("DynamicRmp: NaN value");
    }
    if (after) check_live(*after, "insert_after");
    const OrderIndex::Id oid = after ? order_.insert_after(elems_[after->slot].order) : order_.insert_front();
    const std::uint32_t e = new_elem(value, oid);

    path_.clear();
    std::uint32_t* link = &root_;
    while (*link != kNil) {
      const std::uint32_t x = *link;
      path_.push_back(x);
      Elem& node = elems_[x];
      node.secondary = s_insert(node.secondary, e, &stats_.comparisons);
      ++node.weight;
      link = key_less(e, x, &stats_.comparisons) ? &elems_[x].left : &elems_[x].right;
    }
    *link = e;
    elems_[e].secondary = s_new(e);
    path_.push_back(e);
    rebalance_path();
    return handle_of(e);
  }

  /// Appends at the end of the list.
  ElementHandle push_back(T value) {
    const OrderIndex::Id last = order_.last();
    if (last == OrderIndex::kNil) return insert_after(std::nullopt, value);
    return insert_after(handle_of(owner_[last]), value);
  }

  void erase(ElementHandle h) {
    check_live(h, "erase");
    const std::uint32_t e = h.slot;

    path_.clear();
    std::uint32_t* link = &root_;
    while (*link != e) {
      const std::uint32_t x = *link;
      if (x == kNil) throw std::logic_error("DynamicRmp: element missing from primary tree");
      path_.push_back(x);
      Elem& node = elems_[x];
      node.secondary = s_erase(node.secondary, e, &stats_.comparisons);
      --node.weight;
      link = key_less(e, x, &stats_.comparisons) ? &elems_[x].left : &elems_[x].right;
    }

    Elem& victim = elems_[e];
    victim.secondary = s_erase(victim.secondary, e, &stats_.comparisons);
    --victim.weight;
    if (victim.left == kNil || victim.right == kNil) {
      s_free(victim.secondary);
      *link = victim.left != kNil ? victim.left : victim.right;
    } else {
      // The in-order successor moves up into the victim's place.
      const std::size_t ancestors = path_.size();
      std::uint32_t* s_link = &victim.right;
      while (elems_[*s_link].left != kNil) {
        path_.push_back(*s_link);
        s_link = &elems_[*s_link].left;
      }
      const std::uint32_t s = *s_link;
      // s leaves the subtrees between the victim and its old position.
      for (std::size_t i = ancestors; i < path_.size(); ++i) {
        Elem& y = elems_[path_[i]];
        y.secondary = s_erase(y.secondary, s, &stats_.comparisons);
        --y.weight;
      }
      s_free(elems_[s].secondary);
      *s_link = elems_[s].right;
      Elem& succ = elems_[s];
      succ.left = victim.left;
      succ.right = victim.right;
      succ.weight = victim.weight;
      succ.secondary = victim.secondary;
      *link = s;
      path_.insert(path_.begin() + static_cast<std::ptrdiff_t>(ancestors), s);
    }
    release_elem(e);
    rebalance_path();
  }

  /// Value of the given rank (default lower median) among the elements from
  /// `from` to `to` inclusive. `from` must not follow `to`.
  T query(ElementHandle from, ElementHandle to, std::optional<std::size_t> rank = {}) {
    ++stats_.queries;
    return select(from, to, rank, &stats_.comparisons, &stats_.nodes_visited);
  }

  /// Same as query without touching statistics; safe for concurrent readers.
  T query_shared(ElementHandle from, ElementHandle to, std::optional<std::size_t> rank = {}) const {
    return select(from, to, rank, nullptr, nullptr);
  }

  /// Number of list elements between the endpoints, inclusive.
  std::size_t count_in_range(ElementHandle from, ElementHandle to) {
    check_range(from, to);
    return root_ == kNil ? 0 : s_count_range(elems_[root_].secondary, from.slot, to.slot, &stats_.comparisons);
  }

  /// Replaces the contents with `values` in list order; returns their handles.
  std::vector<ElementHandle> assign(std::span<const T> values) {
    check_orderable(values);
    clear();
    std::vector<std::uint32_t> by_list;
    by_list.reserve(values.size());
    OrderIndex::Id prev = OrderIndex::kNil;
    for (const T& v : values) {
      prev = prev == OrderIndex::kNil ? order_.insert_front() : order_.insert_after(prev);
      by_list.push_back(new_elem(v, prev));
    }
    std::vector<std::uint32_t> by_key = by_list;
    std::sort(by_key.begin(), by_key.end(), [this](std::uint32_t a, std::uint32_t b) {
      return key_less(a, b, &stats_.comparisons);
    });
    for (std::size_t i = 0; i < by_key.size(); ++i) elems_[by_key[i]].scratch = static_cast<std::uint32_t>(i);
    root_ = build(by_key, 0, by_key.size(), by_list);
    std::vector<ElementHandle> handles;
    handles.reserve(by_list.size());
    for (auto e : by_list) handles.push_back(handle_of(e));
    return handles;
  }

  void clear() {
    free_elems_.clear();
    for (std::size_t i = elems_.size(); i-- > 0;) {
      Elem& x = elems_[i];
      if (x.live) ++x.generation;
      x.live = false;
      x.left = x.right = x.secondary = kNil;
      free_elems_.push_back(static_cast<std::uint32_t>(i));
    }
    snodes_.clear();
    free_snodes_.clear();
    owner_.clear();
    order_ = OrderIndex{};
    root_ = kNil;
  }

  /// Handles in list order, read from the root's secondary tree.
  std::vector<ElementHandle> list_order() const {
    std::vector<std::uint32_t> ids;
    if (root_ != kNil) s_inorder(elems_[root_].secondary, ids);
    std::vector<ElementHandle> out;
    out.reserve(ids.size());
    for (auto e : ids) out.push_back(handle_of(e));
    return out;
  }

  /// Bytes held by element records and secondary-tree nodes.
  std::size_t memory_bytes() const noexcept {
    return elems_.capacity() * sizeof(Elem) + snodes_.capacity() * sizeof(SNode) +
           (free_elems_.capacity() + free_snodes_.capacity() + owner_.capacity()) * sizeof(std::uint32_t);
  }

  // Primary-tree inspection.
  std::optional<NodeId> primary_root() const noexcept { return opt(root_); }
  std::optional<NodeId> left(NodeId x) const { return opt(elems_.at(x).left); }
  std::optional<NodeId> right(NodeId x) const { return opt(elems_.at(x).right); }
  T node_value(NodeId x) const { return elems_.at(x).value; }
  std::size_t weight(NodeId x) const { return elems_.at(x).weight; }
  ElementHandle node_handle(NodeId x) const { return handle_of(x); }

  /// Elements of x's primary subtree lying between the endpoints (inclusive).
  std::size_t count_in_range(NodeId x, ElementHandle from, ElementHandle to) {
    check_range(from, to);
    return s_count_range(elems_.at(x).secondary, from.slot, to.slot, &stats_.comparisons);
  }

  bool balanced(NodeId x) const noexcept {
    const Elem& n = elems_[x];
    const std::size_t wl = weight_of(n.left);
    const std::size_t wr = weight_of(n.right);
    return static_cast<double>(std::min(wl, wr) + 1) >= alpha_ * static_cast<double>(n.weight);
  }

  /// Full consistency check; throws std::logic_error on the first violation.
  void audit() const {
    order_.audit();
    std::vector<std::uint32_t> keys;
    audit_node(root_, keys);
    if (keys.size() != size()) throw std::logic_error("audit: primary size mismatch");
    for (std::size_t i = 1; i < keys.size(); ++i)
      if (!key_less(keys[i - 1], keys[i], nullptr)) throw std::logic_error("audit: primary keys out of order");
  }

 private:
  static constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();
  static constexpr std::size_t kDelta = 3;  // secondary weight-balance parameters
  static constexpr std::size_t kRatio = 2;

  struct Elem {
    T value{};
    std::uint64_t seq = 0;
    OrderIndex::Id order = OrderIndex::kNil;
    std::uint32_t generation = 0;
    bool live = false;
    std::uint32_t left = kNil;
    std::uint32_t right = kNil;
    std::uint32_t weight = 0;
    std::uint32_t secondary = kNil;
    std::uint32_t scratch = 0;
  };

  struct SNode {
    std::uint32_t elem;
    std::uint32_t left;
    std::uint32_t right;
    std::uint32_t size;
  };

  static std::optional<NodeId> opt(std::uint32_t x) noexcept {
    return x == kNil ? std::nullopt : std::optional<NodeId>(x);
  }

  ElementHandle handle_of(std::uint32_t e) const noexcept { return {e, elems_[e].generation}; }

  void check_live(ElementHandle h, const char* what) const {
    if (!live(h)) throw std::invalid_argument(std::string(what) + ": stale or unknown handle");
  }

  void check_range(ElementHandle from, ElementHandle to) const {
    check_live(from, "range start");
    check_live(to, "range end");
    if (order_.compare(elems_[from.slot].order, elems_[to.slot].order) > 0)
      throw std::invalid_argument("range endpoints reversed");
  }

  std::size_t weight_of(std::uint32_t x) const noexcept { return x == kNil ? 0 : elems_[x].weight; }

  std::uint32_t new_elem(T value, OrderIndex::Id oid) {
    std::uint32_t e;
    if (!free_elems_.empty()) {
      e = free_elems_.back();
      free_elems_.pop_back();
    } else {
      e = static_cast<std::uint32_t>(elems_.size());
      elems_.emplace_back();
    }
    Elem& x = elems_[e];
    const std::uint32_t gen = x.generation;
    x = Elem{};
    x.generation = gen;
    x.value = value;
    x.seq = next_seq_++;
    x.order = oid;
    x.live = true;
    x.weight = 1;
    if (owner_.size() <= oid) owner_.resize(oid + 1, kNil);
    owner_[oid] = e;
    return e;
  }

  void release_elem(std::uint32_t e) {
    Elem& x = elems_[e];
    order_.erase(x.order);
    owner_[x.order] = kNil;
    x.live = false;
    ++x.generation;
    x.left = x.right = x.secondary = kNil;
    free_elems_.push_back(e);
  }

  bool key_less(std::uint32_t a, std::uint32_t b, std::uint64_t* counter) const noexcept {
    if (counter) ++*counter;
    const Elem& x = elems_[a];
    const Elem& y = elems_[b];
    return x.value < y.value || (!(y.value < x.value) && x.seq < y.seq);
  }

  int order_cmp(std::uint32_t a, std::uint32_t b, std::uint64_t* counter) const noexcept {
    if (counter) ++*counter;
    return order_.compare(elems_[a].order, elems_[b].order);
  }

  T select(ElementHandle from, ElementHandle to, std::optional<std::size_t> rank, std::uint64_t* counter,
           std::uint64_t* visited) const {
    check_range(from, to);
    const std::uint32_t f = from.slot;
    const std::uint32_t t = to.slot;
    const std::size_t total = s_count_range(elems_[root_].secondary, f, t, counter);
    std::size_t p = rank ? *rank : median_rank(total);
    if (p < 1 || p > total)
      throw std::out_of_range("rank " + std::to_string(p) + " outside 1.." + std::to_string(total));
    std::uint32_t x = root_;
    while (x != kNil) {
      if (visited) ++*visited;
      const Elem& node = elems_[x];
      const std::size_t in_left = node.left == kNil ? 0 : s_count_range(elems_[node.left].secondary, f, t, counter);
      if (p <= in_left) {
        x = node.left;
        continue;
      }
      p -= in_left;
      if (order_cmp(f, x, counter) <= 0 && order_cmp(x, t, counter) <= 0) {
        if (p == 1) return node.value;
        --p;
      }
      x = node.right;
    }
    throw std::logic_error("DynamicRmp: rank descent fell off the tree");
  }

  // Rebuild the highest node on path_ that violates the balance condition.
  void rebalance_path() {
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (balanced(path_[i])) continue;
      std::uint32_t* link = &root_;
      if (i > 0) {
        Elem& parent = elems_[path_[i - 1]];
        link = parent.left == path_[i] ? &parent.left : &parent.right;
      }
      rebuild(link);
      return;
    }
  }

  void rebuild(std::uint32_t* link) {
    const std::uint32_t x = *link;
    std::vector<std::uint32_t> by_key;
    by_key.reserve(elems_[x].weight);
    collect_inorder(x, by_key);
    std::vector<std::uint32_t> by_list;
    by_list.reserve(by_key.size());
    s_inorder(elems_[x].secondary, by_list);
    for (auto e : by_key) s_free(elems_[e].secondary);
    for (std::size_t i = 0; i < by_key.size(); ++i) elems_[by_key[i]].scratch = static_cast<std::uint32_t>(i);
    stats_.rebuild_elements += by_key.size();
    *link = build(by_key, 0, by_key.size(), by_list);
  }

  // Perfectly balanced primary subtree over by_key[lo, hi); `by_list` holds the
  // same elements in list order and becomes the root's secondary tree.
  std::uint32_t build(const std::vector<std::uint32_t>& by_key, std::size_t lo, std::size_t hi,
                      const std::vector<std::uint32_t>& by_list) {
    if (lo == hi) return kNil;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::uint32_t x = by_key[mid];
    elems_[x].secondary = s_build(by_list, 0, by_list.size());
    elems_[x].weight = static_cast<std::uint32_t>(hi - lo);
    std::vector<std::uint32_t> left_list;
    std::vector<std::uint32_t> right_list;
    left_list.reserve(mid - lo);
    right_list.reserve(hi - mid - 1);
    for (auto e : by_list) {
      if (elems_[e].scratch < mid) {
        left_list.push_back(e);
      } else if (elems_[e].scratch > mid) {
        right_list.push_back(e);
      }
    }
    elems_[x].left = build(by_key, lo, mid, left_list);
    elems_[x].right = build(by_key, mid + 1, hi, right_list);
    return x;
  }

  void collect_inorder(std::uint32_t x, std::vector<std::uint32_t>& out) const {
    if (x == kNil) return;
    collect_inorder(elems_[x].left, out);
    out.push_back(x);
    collect_inorder(elems_[x].right, out);
  }

  // ---- secondary trees: weight-balanced, ordered by list position ----

  std::uint32_t s_size(std::uint32_t t) const noexcept { return t == kNil ? 0 : snodes_[t].size; }

  std::uint32_t s_new(std::uint32_t e) {
    std::uint32_t t;
    if (!free_snodes_.empty()) {
      t = free_snodes_.back();
      free_snodes_.pop_back();
    } else {
      t = static_cast<std::uint32_t>(snodes_.size());
      snodes_.emplace_back();
    }
    snodes_[t] = SNode{e, kNil, kNil, 1};
    return t;
  }

  void s_free(std::uint32_t t) {
    if (t == kNil) return;
    s_free(snodes_[t].left);
    s_free(snodes_[t].right);
    free_snodes_.push_back(t);
  }

  void s_update(std::uint32_t t) noexcept {
    snodes_[t].size = 1 + s_size(snodes_[t].left) + s_size(snodes_[t].right);
  }

  std::uint32_t s_rotate_left(std::uint32_t t) {
    const std::uint32_t r = snodes_[t].right;
    snodes_[t].right = snodes_[r].left;
    snodes_[r].left = t;
    s_update(t);
    s_update(r);
    return r;
  }

  std::uint32_t s_rotate_right(std::uint32_t t) {
    const std::uint32_t l = snodes_[t].left;
    snodes_[t].left = snodes_[l].right;
    snodes_[l].right = t;
    s_update(t);
    s_update(l);
    return l;
  }

  std::uint32_t s_balance(std::uint32_t t) {
    s_update(t);
    const std::size_t wl = s_size(snodes_[t].left) + 1;
    const std::size_t wr = s_size(snodes_[t].right) + 1;
    if (wr > kDelta * wl) {
      const std::uint32_t r = snodes_[t].right;
      if (s_size(snodes_[r].left) + 1 >= kRatio * (s_size(snodes_[r].right) + 1))
        snodes_[t].right = s_rotate_right(r);
      return s_rotate_left(t);
    }
    if (wl > kDelta * wr) {
      const std::uint32_t l = snodes_[t].left;
      if (s_size(snodes_[l].right) + 1 >= kRatio * (s_size(snodes_[l].left) + 1))
        snodes_[t].left = s_rotate_left(l);
      return s_rotate_right(t);
    }
    return t;
  }

  std::uint32_t s_insert(std::uint32_t t, std::uint32_t e, std::uint64_t* counter) {
    if (t == kNil) return s_new(e);
    if (order_cmp(e, snodes_[t].elem, counter) < 0) {
      const std::uint32_t l = s_insert(snodes_[t].left, e, counter);
      snodes_[t].left = l;
    } else {
      const std::uint32_t r = s_insert(snodes_[t].right, e, counter);
      snodes_[t].right = r;
    }
    return s_balance(t);
  }

  // Detaches the minimum of t; returns (new root, detached node).
  std::pair<std::uint32_t, std::uint32_t> s_take_min(std::uint32_t t) {
    if (snodes_[t].left == kNil) return {snodes_[t].right, t};
    auto [l, m] = s_take_min(snodes_[t].left);
    snodes_[t].left = l;
    return {s_balance(t), m};
  }

  std::uint32_t s_erase(std::uint32_t t, std::uint32_t e, std::uint64_t* counter) {
    if (t == kNil) throw std::logic_error("DynamicRmp: element missing from secondary tree");
    const std::uint32_t here = snodes_[t].elem;
    if (here == e) {
      const std::uint32_t l = snodes_[t].left;
      const std::uint32_t r = snodes_[t].right;
      free_snodes_.push_back(t);
      if (l == kNil) return r;
      if (r == kNil) return l;
      auto [rest, m] = s_take_min(r);
      snodes_[m].left = l;
      snodes_[m].right = rest;
      return s_balance(m);
    }
    if (order_cmp(e, here, counter) < 0) {
      const std::uint32_t l = s_erase(snodes_[t].left, e, counter);
      snodes_[t].left = l;
    } else {
      const std::uint32_t r = s_erase(snodes_[t].right, e, counter);
      snodes_[t].right = r;
    }
    return s_balance(t);
  }

  std::uint32_t s_build(const std::vector<std::uint32_t>& by_list, std::size_t lo, std::size_t hi) {
    if (lo == hi) return kNil;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::uint32_t t = s_new(by_list[mid]);
    const std::uint32_t l = s_build(by_list, lo, mid);
    const std::uint32_t r = s_build(by_list, mid + 1, hi);
    snodes_[t].left = l;
    snodes_[t].right = r;
    s_update(t);
    return t;
  }

  void s_inorder(std::uint32_t t, std::vector<std::uint32_t>& out) const {
    if (t == kNil) return;
    s_inorder(snodes_[t].left, out);
    out.push_back(snodes_[t].elem);
    s_inorder(snodes_[t].right, out);
  }

  // Elements at or before `bound` (inclusive) or strictly before it.
  std::size_t s_count_before(std::uint32_t t, std::uint32_t bound, bool inclusive, std::uint64_t* counter) const {
    std::size_t count = 0;
    while (t != kNil) {
      const int c = order_cmp(snodes_[t].elem, bound, counter);
      if (c < 0 || (inclusive && c == 0)) {
        count += s_size(snodes_[t].left) + 1;
        t = snodes_[t].right;
      } else {
        t = snodes_[t].left;
      }
    }
    return count;
  }

  std::size_t s_count_range(std::uint32_t t, std::uint32_t from, std::uint32_t to, std::uint64_t* counter) const {
    return s_count_before(t, to, true, counter) - s_count_before(t, from, false, counter);
  }

  std::size_t s_audit(std::uint32_t t, std::vector<std::uint32_t>& out) const {
    if (t == kNil) return 0;
    const SNode& s = snodes_[t];
    const std::size_t l = s_audit(s.left, out);
    out.push_back(s.elem);
    const std::size_t r = s_audit(s.right, out);
    if (s.size != l + r + 1) throw std::logic_error("audit: secondary size field wrong");
    if (l + 1 > kDelta * (r + 1) || r + 1 > kDelta * (l + 1))
      throw std::logic_error("audit: secondary tree unbalanced");
    return s.size;
  }

  std::size_t audit_node(std::uint32_t x, std::vector<std::uint32_t>& keys) const {
    if (x == kNil) return 0;
    const Elem& n = elems_[x];
    if (!n.live) throw std::logic_error("audit: dead element in primary tree");
    const std::size_t first = keys.size();
    const std::size_t wl = audit_node(n.left, keys);
    keys.push_back(x);
    const std::size_t wr = audit_node(n.right, keys);
    if (n.weight != wl + wr + 1) throw std::logic_error("audit: primary weight wrong");
    if (!balanced(x)) throw std::logic_error("audit: primary node out of balance");
    std::vector<std::uint32_t> sec;
    s_audit(n.secondary, sec);
    for (std::size_t i = 1; i < sec.size(); ++i)
      if (order_.compare(elems_[sec[i - 1]].order, elems_[sec[i]].order) >= 0)
        throw std::logic_error("audit: secondary not in list order");
    std::vector<std::uint32_t> subtree(keys.begin() + static_cast<std::ptrdiff_t>(first), keys.end());
    std::sort(subtree.begin(), subtree.end());
    std::sort(sec.begin(), sec.end());
    if (subtree != sec) throw std::logic_error("audit: secondary set differs from primary subtree");
    return n.weight;
  }

  double alpha_;
  OrderIndex order_;
  std::vector<Elem> elems_;
  std::vector<std::uint32_t> free_elems_;
  std::vector<std::uint32_t> owner_;  // order id -> element slot
  std::vector<SNode> snodes_;
  std::vector<std::uint32_t> free_snodes_;
  std::uint32_t root_ = kNil;
  std::uint64_t next_seq_ = 0;
  std::vector<std::uint32_t> path_;
  Stats stats_;
};

}  // namespace rangesel
