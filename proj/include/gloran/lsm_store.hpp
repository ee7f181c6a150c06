#ifndef GLORAN_LSM_STORE_HPP
#define GLORAN_LSM_STORE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gloran/bloom.hpp"
#include "gloran/io.hpp"
#include "gloran/types.hpp"

namespace gloran {

struct RangeTombstone {
  Key start = 0;
  Key end = 0;
  SequenceNumber seq = kReservedSeq;
};

enum class LookupOutcome {
  kFound,
  kNotFound,
  kDeletedByTombstone,
  kDeletedByRange,
};

struct LookupResult {
  LookupOutcome outcome = LookupOutcome::kNotFound;
  std::string value;
  SequenceNumber seq = kReservedSeq;

  bool found() const { return outcome == LookupOutcome::kFound; }
};

struct ScanEntry {
  Key key;
  SequenceNumber seq;
  std::string value;
};

// GLORAN wires itself into compactions through this hook: covered VALUE
// entries are purged against the global index, and bottommost compactions
// trigger garbage collection.
class CompactionHook {
 public:
  virtual ~CompactionHook() = default;
  virtual void begin_span(Key lo, Key hi) = 0;
  // VALUE entries only, called in ascending key order within a span.
  virtual bool should_drop(Key key, SequenceNumber seq) = 0;
  virtual void bottom_compaction(Key lo, Key hi) = 0;
};

// One on-disk sorted run: header block, fence array, Bloom bits, data blocks,
// then trailing range-tombstone blocks. Fences and Bloom bits stay resident
// after open; lookups read a single candidate data block.
class SortedRun {
 public:
  static SortedRun write(const StoreConfig& cfg, const std::string& path,
                         std::uint64_t level,
                         const std::vector<Entry>& entries,
                         const std::vector<RangeTombstone>& tombstones,
                         std::shared_ptr<IoStats> stats);
  static SortedRun open(const StoreConfig& cfg, const std::string& path,
                        std::uint64_t level, std::shared_ptr<IoStats> stats);

  // Single-level point probe. Does not consult tombstones.
  struct ProbeResult {
    std::optional<Entry> entry;
    bool bloom_positive = false;
    bool data_block_read = false;
  };
  ProbeResult probe(Key key) const;

  // Max covering tombstone seq, charging one first-page read plus sequential
  // reads of every record with start key below the target.
  struct TombstoneProbe {
    SequenceNumber covering_seq = kReservedSeq;  // 0 when none covers
    std::uint64_t records_examined = 0;
  };
  TombstoneProbe probe_tombstones(Key key) const;

  std::vector<Entry> read_entries() const;
  std::vector<Entry> read_entries_in_range(Key lo, Key hi) const;
  std::vector<RangeTombstone> read_tombstones() const;

  std::uint64_t entry_count() const { return entry_count_; }
  std::uint64_t tombstone_count() const { return tombstone_count_; }
  std::uint64_t level() const { return level_; }
  Key min_key() const { return min_key_; }
  Key max_key() const { return max_key_; }
  SequenceNumber min_seq() const { return min_seq_; }
  // min_seq is not part of the run header; reopened runs restore it from the
  // store manifest.
  void set_min_seq(SequenceNumber s) { min_seq_ = s; }
  const std::string& path() const { return device_->path(); }
  std::uint64_t file_bytes() const { return device_->size_bytes(); }
  const BloomFilter& bloom() const { return bloom_; }
  std::uint64_t fence_count() const { return fences_.size(); }
  // Index of the data block the fence array selects for `key`.
  std::optional<std::uint64_t> fence_lookup(Key key) const;

 private:
  SortedRun() = default;

  std::uint64_t entries_per_block() const;
  std::uint64_t tomb_records_per_block() const;
  std::uint64_t data_offset() const;
  std::uint64_t tombstone_offset() const;
  std::vector<Entry> decode_block(std::uint64_t block_index) const;

  StoreConfig cfg_;
  std::shared_ptr<BlockDevice> device_;
  std::uint64_t level_ = 0;
  std::uint64_t entry_count_ = 0;
  std::uint64_t tombstone_count_ = 0;
  Key min_key_ = 0;
  Key max_key_ = 0;
  SequenceNumber min_seq_ = kReservedSeq;
  std::vector<Key> fences_;
  BloomFilter bloom_;
  std::uint64_t bloom_bytes_ = 0;
};

struct LsmCounters {
  std::uint64_t gets = 0;
  std::uint64_t bloom_probes = 0;
  std::uint64_t bloom_positives = 0;
  std::uint64_t bloom_false_positives = 0;
  std::uint64_t tombstone_records_examined = 0;
  std::uint64_t flushes = 0;
  std::uint64_t compactions = 0;
};

// Leveling LSM-tree with one run per level, plus the point-delete baselines
// and the LRR local range tombstone mode.
class LsmStore {
 public:
  static std::unique_ptr<LsmStore> create(const StoreConfig& cfg,
                                          const std::string& dir,
                                          std::shared_ptr<IoStats> stats);
  static std::unique_ptr<LsmStore> open(const std::string& dir,
                                        std::shared_ptr<IoStats> stats);

  void put(Key key, const std::string& value);
  void delete_key(Key key);
  void range_delete(Key lo, Key hi);
  LookupResult get(Key key);
  std::vector<ScanEntry> scan(Key lo, Key hi);

  void flush();
  void force_flush_and_compact_to_bottom();

  SequenceNumber next_sequence() { return seq_.next(); }
  SequenceNumber last_sequence() const { return seq_.last(); }
  const StoreConfig& config() const { return cfg_; }
  const LsmCounters& counters() const { return counters_; }
  std::shared_ptr<IoStats> stats() const { return stats_; }
  const std::string& dir() const { return dir_; }

  void set_compaction_hook(CompactionHook* hook) { hook_ = hook; }

  std::size_t memtable_size() const { return memtable_.size(); }
  std::size_t level_count() const { return levels_.size(); }
  const std::optional<SortedRun>& level_run(std::size_t i) const {
    return levels_[i];
  }
  std::uint64_t level_capacity(std::size_t level_idx) const;  // 0-based
  // Smallest sequence number present in the memtable or any non-bottom run;
  // nullopt when everything lives at the bottommost level.
  std::optional<SequenceNumber> min_seq_above_bottom() const;
  // Smallest sequence number present anywhere in the store (memtable,
  // pending tombstones, every run); nullopt when the store is empty.
  std::optional<SequenceNumber> min_live_seq() const;
  std::uint64_t total_entries() const;
  std::uint64_t disk_bytes() const;

  void save_manifest() const;

 private:
  LsmStore(StoreConfig cfg, std::string dir, std::shared_ptr<IoStats> stats);

  void maybe_flush();
  void compact(std::size_t level_idx);
  void merge_write(std::size_t target_idx, std::vector<Entry> upper,
                   std::vector<RangeTombstone> upper_tombs, bool from_flush);
  std::string run_path(std::size_t level_idx) const;
  bool is_bottommost(std::size_t level_idx) const;

  StoreConfig cfg_;
  std::string dir_;
  std::shared_ptr<IoStats> stats_;
  SequenceCounter seq_;
  std::map<Key, Entry> memtable_;
  std::vector<RangeTombstone> mem_tombstones_;  // LRR mode only
  std::vector<std::optional<SortedRun>> levels_;
  CompactionHook* hook_ = nullptr;
  LsmCounters counters_;
};

}  // namespace gloran

#endif
