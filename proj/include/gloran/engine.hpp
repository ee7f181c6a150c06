#ifndef GLORAN_ENGINE_HPP
#define GLORAN_ENGINE_HPP

#include <memory>
#include <string>
#include <vector>

#include "gloran/eve.hpp"
#include "gloran/io.hpp"
#include "gloran/lsm_drtree.hpp"
#include "gloran/lsm_store.hpp"
#include "gloran/types.hpp"

namespace gloran {

struct EngineCounters {
  std::uint64_t index_checks = 0;
  std::uint64_t index_node_accesses = 0;
  std::uint64_t eve_probes = 0;
  std::uint64_t eve_maybe_deleted = 0;
  std::uint64_t eve_false_positives = 0;  // MaybeDeleted refuted by the index
  std::uint64_t gc_runs = 0;
  std::uint64_t gc_purged_leaves = 0;
};

// Uniform store surface for the benchmark driver; baselines are plain
// LsmStore, GLORAN layers the global index and estimator on top.
class KvStore {
 public:
  virtual ~KvStore() = default;
  virtual void put(Key key, const std::string& value) = 0;
  virtual void delete_key(Key key) = 0;
  virtual void range_delete(Key lo, Key hi) = 0;
  virtual LookupResult get(Key key) = 0;
  virtual std::vector<ScanEntry> scan(Key lo, Key hi) = 0;
  virtual void flush_all() = 0;

  virtual LsmStore& lsm() = 0;
  virtual const EngineCounters* engine_counters() const { return nullptr; }
  virtual const LsmDRtreeIndex* index() const { return nullptr; }
  virtual std::uint64_t disk_bytes() const = 0;
};

std::unique_ptr<KvStore> create_store(const StoreConfig& cfg,
                                      const std::string& dir,
                                      std::shared_ptr<IoStats> stats);
std::unique_ptr<KvStore> open_store(const std::string& dir,
                                    std::shared_ptr<IoStats> stats);

class GloranStore : public KvStore, private CompactionHook {
 public:
  static std::unique_ptr<GloranStore> create(const StoreConfig& cfg,
                                             const std::string& dir,
                                             std::shared_ptr<IoStats> stats);
  static std::unique_ptr<GloranStore> open(const std::string& dir,
                                           std::shared_ptr<IoStats> stats);

  void put(Key key, const std::string& value) override;
  void delete_key(Key key) override;
  void range_delete(Key lo, Key hi) override;
  LookupResult get(Key key) override;
  std::vector<ScanEntry> scan(Key lo, Key hi) override;
  void flush_all() override;

  LsmStore& lsm() override { return *lsm_; }
  const EngineCounters* engine_counters() const override { return &counters_; }
  const LsmDRtreeIndex* index() const override { return &index_; }
  LsmDRtreeIndex& index_mut() { return index_; }
  const Eve& eve() const { return eve_; }
  std::uint64_t disk_bytes() const override;

  // Forces remaining data to the bottom level and runs garbage collection.
  void compact_to_bottom_and_gc();

 private:
  GloranStore(std::unique_ptr<LsmStore> lsm, StoreConfig cfg, std::string dir,
              std::shared_ptr<IoStats> stats);

  // CompactionHook
  void begin_span(Key lo, Key hi) override;
  bool should_drop(Key key, SequenceNumber seq) override;
  void bottom_compaction(Key lo, Key hi) override;

  void maybe_gc(Key lo, Key hi);
  void rebuild_eve();

  std::unique_ptr<LsmStore> lsm_;
  StoreConfig cfg_;
  std::string dir_;
  std::shared_ptr<IoStats> stats_;
  LsmDRtreeIndex index_;
  Eve eve_;
  EngineCounters counters_;

  // Streams of span areas consumed in key order during one compaction.
  std::vector<std::vector<EffectiveArea>> span_streams_;
  std::vector<std::size_t> span_cursors_;
};

class BaselineStore : public KvStore {
 public:
  explicit BaselineStore(std::unique_ptr<LsmStore> lsm)
      : lsm_(std::move(lsm)) {}

  void put(Key key, const std::string& value) override {
    lsm_->put(key, value);
  }
  void delete_key(Key key) override { lsm_->delete_key(key); }
  void range_delete(Key lo, Key hi) override { lsm_->range_delete(lo, hi); }
  LookupResult get(Key key) override { return lsm_->get(key); }
  std::vector<ScanEntry> scan(Key lo, Key hi) override {
    return lsm_->scan(lo, hi);
  }
  void flush_all() override {
    lsm_->flush();
    lsm_->save_manifest();
  }
  LsmStore& lsm() override { return *lsm_; }
  std::uint64_t disk_bytes() const override { return lsm_->disk_bytes(); }

 private:
  std::unique_ptr<LsmStore> lsm_;
};

}  // namespace gloran

#endif
