#ifndef GLORAN_RTREE_HPP
#define GLORAN_RTREE_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "gloran/effective_area.hpp"
#include "gloran/types.hpp"

namespace gloran {

// In-memory R-tree write buffer for effective areas. Insertion descends into
// the child whose MBR needs the smallest enlargement; overflowing nodes are
// split with Guttman's quadratic split.
class RTreeBuffer {
 public:
  static constexpr std::size_t kNodeCapacity = 8;

  RTreeBuffer() = default;

  void insert(const EffectiveArea& a);
  bool covers(Key key, SequenceNumber seq) const;
  std::vector<EffectiveArea> all_areas() const;
  void clear();
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  // Smallest entry count seen in any node created by a split, for invariant
  // checks. Nodes keep at least ceil(capacity/2) - 1 entries.
  std::size_t min_split_fill() const { return min_split_fill_; }

  struct Node;

 private:
  struct Rect {
    Key key_lo, key_hi;
    SequenceNumber seq_lo, seq_hi;
  };

  struct ChildRef {
    Rect rect;
    std::unique_ptr<Node> node;          // null for leaf entries
    EffectiveArea area;                  // valid when node is null
  };

 public:
  struct Node {
    bool leaf = true;
    std::vector<ChildRef> children;
  };

 private:
  static Rect rect_of(const EffectiveArea& a);
  static Rect merge(const Rect& a, const Rect& b);
  static long double rect_area(const Rect& r);
  static bool rect_contains(const Rect& r, Key key, SequenceNumber seq);

  void insert_rec(Node* node, ChildRef entry,
                  std::unique_ptr<Node>* split_out, Rect* split_rect);
  std::unique_ptr<Node> split_node(Node* node);
  void collect(const Node* node, std::vector<EffectiveArea>* out) const;
  bool covers_rec(const Node* node, Key key, SequenceNumber seq) const;

  std::unique_ptr<Node> root_;
  std::size_t count_ = 0;
  std::size_t min_split_fill_ = kNodeCapacity;
};

}  // namespace gloran

#endif
