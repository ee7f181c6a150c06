#ifndef GLORAN_DR_TREE_HPP
#define GLORAN_DR_TREE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gloran/effective_area.hpp"
#include "gloran/io.hpp"
#include "gloran/types.hpp"

namespace gloran {

struct DrQueryResult {
  std::optional<EffectiveArea> covered;
  std::uint64_t node_accesses = 0;
};

// Immutable on-disk hierarchy over key-disjoint effective areas. Areas are
// packed D per leaf block; internal levels pack D child slots per block and
// are serialized root-first, so the leaf level is a contiguous sorted run of
// blocks. Point queries touch one block per level.
class DRTree {
 public:
  // `areas` must be sorted by key_lo and pairwise key-disjoint.
  static DRTree build(const std::vector<EffectiveArea>& areas,
                      const StoreConfig& cfg, const std::string& path,
                      std::shared_ptr<IoStats> stats);

  static DRTree open(const StoreConfig& cfg, const std::string& path,
                     std::shared_ptr<IoStats> stats);

  DrQueryResult query_point(Key key, SequenceNumber seq) const;

  // Leaf areas intersecting [key_lo, key_hi) in ascending key order, read
  // with sequential block I/O over the leaf level.
  std::vector<EffectiveArea> iterate(Key key_lo, Key key_hi) const;
  std::vector<EffectiveArea> all_leaves() const;

  bool empty() const { return leaf_count_ == 0; }
  std::uint64_t leaf_count() const { return leaf_count_; }
  std::uint64_t height() const { return height_; }
  // Conceptual node count audited against the (D/(D-1)) * leaf_count bound:
  // every leaf area plus every internal block.
  std::uint64_t node_count() const { return node_count_; }
  SequenceNumber min_seq_hi() const { return min_seq_hi_; }
  SequenceNumber max_seq_hi() const { return max_seq_hi_; }
  const std::string& path() const { return device_ ? device_->path() : path_; }

  std::uint64_t file_bytes() const {
    return device_ ? device_->size_bytes() : 0;
  }

  // Process-wide audits: every build checks node_count against the
  // (D/(D-1)) * leaf_count bound, every point query checks node_accesses
  // against the height. Violation counts should stay at zero.
  static std::uint64_t audit_builds();
  static std::uint64_t audit_space_violations();
  static std::uint64_t audit_queries();
  static std::uint64_t audit_height_violations();

 private:
  DRTree() = default;

  struct Slot {
    Key key_lo, key_hi;
    SequenceNumber seq_lo, seq_hi;
    std::uint64_t child;
  };

  std::vector<Slot> read_node(std::uint64_t level, std::uint64_t index) const;
  std::uint64_t level_offset(std::uint64_t level) const;
  std::uint64_t slots_per_node() const;

  std::string path_;
  std::shared_ptr<BlockDevice> device_;
  std::uint64_t block_size_ = 4096;
  std::uint64_t key_width_ = 8;
  std::uint64_t fanout_ = 10;
  std::uint64_t height_ = 0;
  std::uint64_t leaf_count_ = 0;
  std::uint64_t node_count_ = 0;
  SequenceNumber min_seq_hi_ = 0;
  SequenceNumber max_seq_hi_ = 0;
  // level 1 = root ... level height = leaf blocks
  std::vector<std::uint64_t> level_node_counts_;
  std::vector<std::uint64_t> level_offsets_;
};

}  // namespace gloran

#endif
