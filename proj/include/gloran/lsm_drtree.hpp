#ifndef GLORAN_LSM_DRTREE_HPP
#define GLORAN_LSM_DRTREE_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gloran/dr_tree.hpp"
#include "gloran/effective_area.hpp"
#include "gloran/io.hpp"
#include "gloran/rtree.hpp"
#include "gloran/types.hpp"

namespace gloran {

struct CheckResult {
  bool deleted = false;
  std::uint64_t node_accesses = 0;
};

// Leveled global index of DR-trees with an in-memory R-tree write buffer.
// Each on-disk level holds zero or one immutable DR-tree; levels are merged
// downward by streaming two-way compaction with pairwise disjointization.
class LsmDRtreeIndex {
 public:
  LsmDRtreeIndex(StoreConfig cfg, std::string dir,
                 std::shared_ptr<IoStats> stats);

  void insert_record(const RangeRecord& r);
  void flush_buffer();

  CheckResult check_deleted(Key key, SequenceNumber seq) const;

  // Leaf areas intersecting [key_lo, key_hi), one sorted disjoint stream per
  // occupied on-disk level. The buffer is queried separately.
  std::vector<std::vector<EffectiveArea>> span_streams(Key key_lo,
                                                       Key key_hi) const;
  bool buffer_covers(Key key, SequenceNumber seq) const {
    return buffer_.covers(key, seq);
  }
  std::vector<EffectiveArea> all_areas() const;

  void advance_watermark(SequenceNumber w);
  // Drops bottom-level leaves with seq_hi <= watermark whose key range lies
  // inside [keyspan_lo, keyspan_hi). Returns the number of purged leaves.
  std::uint64_t gc(Key keyspan_lo, Key keyspan_hi);

  SequenceNumber watermark() const { return watermark_; }
  std::size_t buffer_size() const { return buffer_.size(); }
  std::uint64_t record_count() const { return record_count_; }
  std::uint64_t level_count() const { return levels_.size(); }
  const std::optional<DRTree>& level_tree(std::size_t i) const {
    return levels_[i];
  }

  // Zero as long as every check_deleted stayed within the per-level height
  // summation bound.
  std::uint64_t access_bound_violations() const {
    return access_bound_violations_;
  }
  std::uint64_t access_bound(std::size_t levels) const;

  // Smallest seq_hi among all areas held (buffer included); nullopt when the
  // index is empty. A delete older than this covers nothing anymore.
  std::optional<SequenceNumber> min_seq_hi() const;

  std::uint64_t total_node_count() const;
  std::uint64_t total_leaf_count() const;
  std::uint64_t disk_bytes() const;

  void save_manifest() const;
  void load_from_manifest();

  // Merge of two disjoint sorted streams, disjointizing overlaps pairwise.
  // Exposed for tests against sweep_disjointize.
  static std::vector<EffectiveArea> merge_disjoint_streams(
      const std::vector<EffectiveArea>& a, const std::vector<EffectiveArea>& b);

 private:
  std::uint64_t level_capacity(std::size_t level_idx) const;  // 0-based
  std::string level_path(std::size_t level_idx) const;
  void place_tree(std::size_t level_idx, std::vector<EffectiveArea> areas);
  void compact_into(std::size_t level_idx);

  StoreConfig cfg_;
  std::string dir_;
  std::shared_ptr<IoStats> stats_;
  RTreeBuffer buffer_;
  std::vector<std::optional<DRTree>> levels_;  // index 0 = level 1
  SequenceNumber watermark_ = kReservedSeq;
  std::uint64_t record_count_ = 0;
  mutable std::uint64_t access_bound_violations_ = 0;
};

}  // namespace gloran

#endif
