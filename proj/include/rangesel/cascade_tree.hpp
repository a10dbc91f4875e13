#pragma once

// Lazily split value-partition tree with cascaded child positions.
//
// Every node keeps its elements in original-index order together with, for each
// position j, the number of its elements up to j that went to the low child
// (low_pred) and to the high child (high_pred). A query walks one root-to-leaf
// path carrying the predecessor positions of L-1 and R; each level costs two
// table lookups once the node has been split. Nodes are split the first time
// a query reaches them.
//
// Storage is flat: node elements and cascade tables live in shared append-only
// buffers, and nodes refer to them by offset.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangesel/core.hpp"
#include "rangesel/kernels.hpp"
#include "rangesel/selection.hpp"

namespace rangesel {

template <ElementValue T>
class CascadeTree {
 public:
  using NodeId = std::uint32_t;

  struct NodeView {
    std::span<const T> values;
    std::span<const std::uint32_t> indices;
    std::span<const std::uint32_t> low_pred;   // empty until split
    std::span<const std::uint32_t> high_pred;  // empty until split
    std::optional<NodeId> low;
    std::optional<NodeId> high;
    std::size_t level = 0;
  };

  explicit CascadeTree(std::span<const T> values, SelectionStrategy strategy = {})
      : strategy_(strategy) {
    if (values.empty()) throw std::invalid_argument("CascadeTree: empty input");
    if (values.size() >= std::numeric_limits<std::uint32_t>::max())
      throw std::length_error("CascadeTree: input too large");
    check_orderable(values);
    values_.assign(values.begin(), values.end());
    indices_.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      indices_[i] = static_cast<std::uint32_t>(i + 1);
    nodes_.push_back(Node{0, 0, static_cast<std::uint32_t>(values.size()), kNone, kNone, 0});
    pending_splits_ = values.size() >= 2 ? 1 : 0;
  }

  std::size_t size() const noexcept { return indices_.empty() ? 0 : nodes_[0].size; }
  NodeId root() const noexcept { return 0; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const Stats& stats() const noexcept { return stats_; }

  /// True once no node with two or more elements remains unsplit.
  bool complete() const noexcept { return pending_splits_ == 0; }

  /// Cross-check every cascaded position against a binary search over the
  /// child's original indices; a mismatch throws std::logic_error.
  void set_verify_cascade(bool on) noexcept { verify_ = on; }

  NodeView node(NodeId id) const {
    const Node& nd = nodes_.at(id);
    NodeView v;
    v.values = std::span<const T>(values_).subspan(nd.elems_at, nd.size);
    v.indices = std::span<const std::uint32_t>(indices_).subspan(nd.elems_at, nd.size);
    if (nd.low != kNone) {
      v.low_pred = std::span<const std::uint32_t>(low_pred_).subspan(nd.pred_at, nd.size);
      v.high_pred = std::span<const std::uint32_t>(high_pred_).subspan(nd.pred_at, nd.size);
      v.low = nd.low;
      v.high = nd.high;
    }
    v.level = nd.level;
    return v;
  }

  /// Materializes the children of an unsplit node with at least two elements.
  void split(NodeId id) {
    const Node nd = nodes_.at(id);
    if (nd.low != kNone) throw std::logic_error("split: node already split");
    if (nd.size < 2) throw std::logic_error("split: singleton node");
    const std::size_t m = nd.size;
    const std::size_t low_size = (m + 1) / 2;

    scratch_.resize(m);
    for (std::size_t j = 0; j < m; ++j)
      scratch_[j] = Element<T>{values_[nd.elems_at + j], indices_[nd.elems_at + j]};
    SelectionStrategy s = strategy_;
    s.seed = mix_seed(strategy_.seed ^ mix_seed(split_counter_++));
    const Element<T> pivot =
        select_kth_inplace<T>(std::span<Element<T>>(scratch_), low_size, s, &stats_.comparisons);

    mask_.resize(kernels::words_for(m));
    const std::size_t ones = kernels::classify_le_any<T>(
        std::span<const T>(values_).subspan(nd.elems_at, m),
        std::span<const std::uint32_t>(indices_).subspan(nd.elems_at, m), pivot.value,
        pivot.index, mask_);
    stats_.comparisons += m;
    if (ones != low_size) throw std::logic_error("split: pivot is not the median");

    const std::size_t child_at = values_.size();
    const std::size_t pred_at = low_pred_.size();
    values_.resize(child_at + m);
    indices_.resize(child_at + m);
    low_pred_.resize(pred_at + m);
    high_pred_.resize(pred_at + m);
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t src = nd.elems_at + j;
      const std::size_t dst = (mask_[j / 64] >> (j % 64)) & 1U ? child_at + lo++
                                                               : child_at + low_size + hi++;
      values_[dst] = values_[src];
      indices_[dst] = indices_[src];
      low_pred_[pred_at + j] = static_cast<std::uint32_t>(lo);
      high_pred_[pred_at + j] = static_cast<std::uint32_t>(hi);
    }

    const auto low_id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{child_at, 0, static_cast<std::uint32_t>(low_size), kNone, kNone,
                          nd.level + 1});
    nodes_.push_back(Node{child_at + low_size, 0, static_cast<std::uint32_t>(m - low_size), kNone,
                          kNone, nd.level + 1});
    Node& self = nodes_[id];
    self.pred_at = pred_at;
    self.low = low_id;
    self.high = low_id + 1;
    pending_splits_ += (low_size >= 2) + (m - low_size >= 2) - 1;
    stats_.record_split(nd.level, m);
  }

  /// Element of the requested rank in A[left..right]; splits nodes on the way.
  Element<T> query(const RangeQuery& q, QueryTrace* trace = nullptr) {
    q.validate(size());
    ++stats_.queries;
    std::size_t p = q.resolved_rank();
    std::size_t pos_l = q.left - 1;
    std::size_t pos_r = q.right;
    NodeId id = root();
    while (true) {
      ++stats_.nodes_visited;
      if (nodes_[id].size == 1) {
        const Node& leaf = nodes_[id];
        return Element<T>{values_[leaf.elems_at], indices_[leaf.elems_at]};
      }
      if (nodes_[id].low == kNone) split(id);
      const Node& nd = nodes_[id];
      const std::size_t l = pos_l == 0 ? 0 : low_pred_[nd.pred_at + pos_l - 1];
      const std::size_t r = pos_r == 0 ? 0 : low_pred_[nd.pred_at + pos_r - 1];
      stats_.cascade_steps += 2;
      if (verify_) verify_step(nd, q, l, r);
      const std::size_t in_low = r - l;
      const bool go_low = p <= in_low;
      if (trace) trace->steps.push_back({nd.level, nd.size, pos_l, pos_r, p, in_low, go_low});
      if (go_low) {
        pos_l = l;
        pos_r = r;
        id = nd.low;
      } else {
        pos_l = pos_l == 0 ? 0 : high_pred_[nd.pred_at + pos_l - 1];
        pos_r = pos_r == 0 ? 0 : high_pred_[nd.pred_at + pos_r - 1];
        p -= in_low;
        id = nd.high;
      }
    }
  }

  /// Read-only query for a complete tree; safe to call concurrently.
  /// Throws std::logic_error if the descent reaches an unsplit node.
  Element<T> query_shared(const RangeQuery& q) const {
    q.validate(size());
    std::size_t p = q.resolved_rank();
    std::size_t pos_l = q.left - 1;
    std::size_t pos_r = q.right;
    NodeId id = root();
    while (nodes_[id].size > 1) {
      const Node& nd = nodes_[id];
      if (nd.low == kNone) throw std::logic_error("query_shared: tree not fully built");
      const std::size_t l = pos_l == 0 ? 0 : low_pred_[nd.pred_at + pos_l - 1];
      const std::size_t r = pos_r == 0 ? 0 : low_pred_[nd.pred_at + pos_r - 1];
      if (p <= r - l) {
        pos_l = l;
        pos_r = r;
        id = nd.low;
      } else {
        pos_l = pos_l == 0 ? 0 : high_pred_[nd.pred_at + pos_l - 1];
        pos_r = pos_r == 0 ? 0 : high_pred_[nd.pred_at + pos_r - 1];
        p -= r - l;
        id = nd.high;
      }
    }
    const Node& leaf = nodes_[id];
    return Element<T>{values_[leaf.elems_at], indices_[leaf.elems_at]};
  }

  /// Splits every node down to singletons.
  void build_eager() {
    reserve_full();
    // Children are appended after their parent, so one forward sweep suffices.
    for (NodeId id = 0; id < nodes_.size(); ++id) {
      if (nodes_[id].size >= 2 && nodes_[id].low == kNone) split(id);
    }
  }

  /// Bytes held by element buffers, cascade tables and node records.
  std::size_t memory_bytes() const noexcept {
    return values_.size() * sizeof(T) + indices_.size() * sizeof(std::uint32_t) +
           (low_pred_.size() + high_pred_.size()) * sizeof(std::uint32_t) +
           nodes_.size() * sizeof(Node);
  }

 private:
  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  struct Node {
    std::size_t elems_at;
    std::size_t pred_at;
    std::uint32_t size;
    NodeId low;
    NodeId high;
    std::uint32_t level;
  };

  void verify_step(const Node& nd, const RangeQuery& q, std::size_t l, std::size_t r) const {
    const Node& low = nodes_[nd.low];
    const auto idx = std::span<const std::uint32_t>(indices_).subspan(low.elems_at, low.size);
    auto find = [&](std::size_t key) {
      return static_cast<std::size_t>(std::upper_bound(idx.begin(), idx.end(), key) - idx.begin());
    };
    if (find(q.left - 1) != l || find(q.right) != r)
      throw std::logic_error("cascade position disagrees with binary search");
  }

  // Exact totals for a full build: node sizes on each level take at most two values.
  void reserve_full() {
    std::map<std::size_t, std::size_t> level{{nodes_[0].size, 1}};
    std::size_t elems = 0;
    std::size_t preds = 0;
    std::size_t nodes = 0;
    while (!level.empty()) {
      std::map<std::size_t, std::size_t> next;
      for (auto [m, count] : level) {
        elems += m * count;
        nodes += count;
        if (m >= 2) {
          preds += m * count;
          next[(m + 1) / 2] += count;
          next[m / 2] += count;
        }
      }
      level = std::move(next);
    }
    if (elems > values_.capacity()) {
      values_.reserve(elems);
      indices_.reserve(elems);
    }
    low_pred_.reserve(preds);
    high_pred_.reserve(preds);
    nodes_.reserve(nodes);
  }

  std::vector<T> values_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint32_t> low_pred_;
  std::vector<std::uint32_t> high_pred_;
  std::vector<Node> nodes_;
  Stats stats_;
  SelectionStrategy strategy_;
  std::uint64_t split_counter_ = 0;
  std::size_t pending_splits_ = 0;
  bool verify_ = false;
  std::vector<Element<T>> scratch_;
  std::vector<std::uint64_t> mask_;
};

}  // namespace rangesel
