#include "gloran/rtree.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace gloran {

RTreeBuffer::Rect RTreeBuffer::rect_of(const EffectiveArea& a) {
  return {a.key_lo, a.key_hi, a.seq_lo, a.seq_hi};
}

RTreeBuffer::Rect RTreeBuffer::merge(const Rect& a, const Rect& b) {
  return {std::min(a.key_lo, b.key_lo), std::max(a.key_hi, b.key_hi),
          std::min(a.seq_lo, b.seq_lo), std::max(a.seq_hi, b.seq_hi)};
}

long double RTreeBuffer::rect_area(const Rect& r) {
  return static_cast<long double>(r.key_hi - r.key_lo) *
         static_cast<long double>(r.seq_hi - r.seq_lo);
}

bool RTreeBuffer::rect_contains(const Rect& r, Key key, SequenceNumber seq) {
  return r.key_lo <= key && key < r.key_hi && r.seq_lo <= seq && seq < r.seq_hi;
}

void RTreeBuffer::insert(const EffectiveArea& a) {
  assert(a.valid());
  if (!root_) {
    root_ = std::make_unique<Node>();
    root_->leaf = true;
  }
  ChildRef entry;
  entry.rect = rect_of(a);
  entry.area = a;
  std::unique_ptr<Node> split;
  Rect split_rect{};
  insert_rec(root_.get(), std::move(entry), &split, &split_rect);
  if (split) {
    // Root overflowed: grow a new root over the two halves.
    auto new_root = std::make_unique<Node>();
    new_root->leaf = false;
    Rect old_rect = root_->children.front().rect;
    for (const auto& c : root_->children) old_rect = merge(old_rect, c.rect);
    ChildRef left;
    left.rect = old_rect;
    left.node = std::move(root_);
    ChildRef right;
    right.rect = split_rect;
    right.node = std::move(split);
    new_root->children.push_back(std::move(left));
    new_root->children.push_back(std::move(right));
    root_ = std::move(new_root);
  }
  ++count_;
}

void RTreeBuffer::insert_rec(Node* node, ChildRef entry,
                             std::unique_ptr<Node>* split_out,
                             Rect* split_rect) {
  if (node->leaf) {
    node->children.push_back(std::move(entry));
  } else {
    // Minimum area enlargement, ties by smaller area.
    std::size_t best = 0;
    long double best_enlarge = std::numeric_limits<long double>::max();
    long double best_area = 0;
    for (std::size_t i = 0; i < node->children.size(); ++i) {
      const Rect& r = node->children[i].rect;
      long double enlarged = rect_area(merge(r, entry.rect)) - rect_area(r);
      if (enlarged < best_enlarge ||
          (enlarged == best_enlarge && rect_area(r) < best_area)) {
        best_enlarge = enlarged;
        best_area = rect_area(r);
        best = i;
      }
    }
    Node* chosen = node->children[best].node.get();
    std::unique_ptr<Node> child_split;
    Rect child_split_rect{};
    Rect entry_rect = entry.rect;
    insert_rec(chosen, std::move(entry), &child_split, &child_split_rect);
    node->children[best].rect = merge(node->children[best].rect, entry_rect);
    if (child_split) {
      // Recompute the tightened MBR of the split child.
      Rect r = chosen->children.front().rect;
      for (const auto& c : chosen->children) r = merge(r, c.rect);
      node->children[best].rect = r;
      ChildRef extra;
      extra.rect = child_split_rect;
      extra.node = std::move(child_split);
      node->children.push_back(std::move(extra));
    }
  }
  if (node->children.size() > kNodeCapacity) {
    auto half = split_node(node);
    Rect r = half->children.front().rect;
    for (const auto& c : half->children) r = merge(r, c.rect);
    *split_rect = r;
    *split_out = std::move(half);
  }
}

std::unique_ptr<RTreeBuffer::Node> RTreeBuffer::split_node(Node* node) {
  // Guttman quadratic split: seed with the pair wasting the most area, then
  // assign remaining entries by largest enlargement difference, respecting
  // the minimum fill of ceil(capacity/2) - 1.
  const std::size_t min_fill = (kNodeCapacity + 1) / 2 - 1;
  std::vector<ChildRef> all = std::move(node->children);
  node->children.clear();

  std::size_t seed_a = 0, seed_b = 1;
  long double worst = -1;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      long double waste = rect_area(merge(all[i].rect, all[j].rect)) -
                          rect_area(all[i].rect) - rect_area(all[j].rect);
      if (waste > worst) {
        worst = waste;
        seed_a = i;
        seed_b = j;
      }
    }
  }

  auto other = std::make_unique<Node>();
  other->leaf = node->leaf;
  Rect rect_a = all[seed_a].rect;
  Rect rect_b = all[seed_b].rect;
  std::vector<bool> taken(all.size(), false);
  taken[seed_a] = taken[seed_b] = true;
  node->children.push_back(std::move(all[seed_a]));
  other->children.push_back(std::move(all[seed_b]));

  std::size_t remaining = all.size() - 2;
  while (remaining > 0) {
    // Force assignment when a group must take everything left to reach fill.
    if (node->children.size() + remaining <= min_fill) {
      for (std::size_t i = 0; i < all.size(); ++i)
        if (!taken[i]) {
          rect_a = merge(rect_a, all[i].rect);
          node->children.push_back(std::move(all[i]));
          taken[i] = true;
        }
      break;
    }
    if (other->children.size() + remaining <= min_fill) {
      for (std::size_t i = 0; i < all.size(); ++i)
        if (!taken[i]) {
          rect_b = merge(rect_b, all[i].rect);
          other->children.push_back(std::move(all[i]));
          taken[i] = true;
        }
      break;
    }
    std::size_t pick = all.size();
    long double best_diff = -1;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (taken[i]) continue;
      long double da = rect_area(merge(rect_a, all[i].rect)) - rect_area(rect_a);
      long double db = rect_area(merge(rect_b, all[i].rect)) - rect_area(rect_b);
      long double diff = da > db ? da - db : db - da;
      if (diff > best_diff) {
        best_diff = diff;
        pick = i;
      }
    }
    long double da = rect_area(merge(rect_a, all[pick].rect)) - rect_area(rect_a);
    long double db = rect_area(merge(rect_b, all[pick].rect)) - rect_area(rect_b);
    if (da <= db) {
      rect_a = merge(rect_a, all[pick].rect);
      node->children.push_back(std::move(all[pick]));
    } else {
      rect_b = merge(rect_b, all[pick].rect);
      other->children.push_back(std::move(all[pick]));
    }
    taken[pick] = true;
    --remaining;
  }
  min_split_fill_ = std::min(
      {min_split_fill_, node->children.size(), other->children.size()});
  return other;
}

bool RTreeBuffer::covers(Key key, SequenceNumber seq) const {
  return root_ && covers_rec(root_.get(), key, seq);
}

bool RTreeBuffer::covers_rec(const Node* node, Key key,
                             SequenceNumber seq) const {
  for (const auto& c : node->children) {
    if (!rect_contains(c.rect, key, seq)) continue;
    if (node->leaf) {
      if (c.area.covers(key, seq)) return true;
    } else if (covers_rec(c.node.get(), key, seq)) {
      return true;
    }
  }
  return false;
}

void RTreeBuffer::collect(const Node* node,
                          std::vector<EffectiveArea>* out) const {
  for (const auto& c : node->children) {
    if (node->leaf)
      out->push_back(c.area);
    else
      collect(c.node.get(), out);
  }
}

std::vector<EffectiveArea> RTreeBuffer::all_areas() const {
  std::vector<EffectiveArea> out;
  if (root_) collect(root_.get(), &out);
  return out;
}

void RTreeBuffer::clear() {
  root_.reset();
  count_ = 0;
}

}  // namespace gloran
