#include "gloran/engine.hpp"

#include <algorithm>

namespace gloran {

GloranStore::GloranStore(std::unique_ptr<LsmStore> lsm, StoreConfig cfg,
                         std::string dir, std::shared_ptr<IoStats> stats)
    : lsm_(std::move(lsm)),
      cfg_(std::move(cfg)),
      dir_(std::move(dir)),
      stats_(std::move(stats)),
      index_(cfg_, dir_, stats_),
      eve_(cfg_) {
  lsm_->set_compaction_hook(this);
}

std::unique_ptr<GloranStore> GloranStore::create(
    const StoreConfig& cfg, const std::string& dir,
    std::shared_ptr<IoStats> stats) {
  auto lsm = LsmStore::create(cfg, dir, stats);
  auto store = std::unique_ptr<GloranStore>(
      new GloranStore(std::move(lsm), cfg, dir, std::move(stats)));
  store->index_.save_manifest();
  return store;
}

std::unique_ptr<GloranStore> GloranStore::open(const std::string& dir,
                                               std::shared_ptr<IoStats> stats) {
  auto lsm = LsmStore::open(dir, stats);
  StoreConfig cfg = lsm->config();
  auto store = std::unique_ptr<GloranStore>(
      new GloranStore(std::move(lsm), cfg, dir, std::move(stats)));
  store->index_.load_from_manifest();
  store->rebuild_eve();
  return store;
}

void GloranStore::put(Key key, const std::string& value) {
  lsm_->put(key, value);
}

void GloranStore::delete_key(Key key) { lsm_->delete_key(key); }

void GloranStore::range_delete(Key lo, Key hi) {
  if (lo >= hi) throw StoreError("range_delete: lo must be < hi");
  if (hi > cfg_.key_universe) throw StoreError("range outside universe");
  SequenceNumber seq = lsm_->next_sequence();
  // seq_lo must not exceed the seq of any live entry the delete could cover,
  // bottom level included; the GC watermark alone can run past old survivors
  // down there.
  SequenceNumber seq_lo = lsm_->min_live_seq().value_or(seq);
  if (seq_lo >= seq) seq_lo = seq - 1;
  RangeRecord rec;
  rec.area = EffectiveArea{lo, hi, seq_lo, seq};
  index_.insert_record(rec);
  eve_.insert(lo, hi, seq);
}

LookupResult GloranStore::get(Key key) {
  LookupResult r = lsm_->get(key);
  if (!r.found()) return r;
  ++counters_.eve_probes;
  if (eve_.query(key, r.seq) == Validity::kDefinitelyValid) return r;
  ++counters_.eve_maybe_deleted;
  ++counters_.index_checks;
  CheckResult c = index_.check_deleted(key, r.seq);
  counters_.index_node_accesses += c.node_accesses;
  if (c.deleted) {
    LookupResult out;
    out.outcome = LookupOutcome::kDeletedByRange;
    return out;
  }
  ++counters_.eve_false_positives;
  return r;
}

std::vector<ScanEntry> GloranStore::scan(Key lo, Key hi) {
  std::vector<ScanEntry> raw = lsm_->scan(lo, hi);
  std::vector<ScanEntry> out;
  out.reserve(raw.size());
  for (ScanEntry& e : raw) {
    ++counters_.index_checks;
    CheckResult c = index_.check_deleted(e.key, e.seq);
    counters_.index_node_accesses += c.node_accesses;
    if (!c.deleted) out.push_back(std::move(e));
  }
  return out;
}

void GloranStore::flush_all() {
  lsm_->flush();
  lsm_->save_manifest();
  // The EVE is rebuilt from index leaves on open, so buffered records must
  // reach disk before close.
  index_.flush_buffer();
  index_.save_manifest();
}

std::uint64_t GloranStore::disk_bytes() const {
  return lsm_->disk_bytes() + index_.disk_bytes();
}

void GloranStore::compact_to_bottom_and_gc() {
  lsm_->force_flush_and_compact_to_bottom();
  index_.save_manifest();
}

void GloranStore::begin_span(Key lo, Key hi) {
  span_streams_ = index_.span_streams(lo, hi);
  span_cursors_.assign(span_streams_.size(), 0);
}

bool GloranStore::should_drop(Key key, SequenceNumber seq) {
  if (index_.buffer_covers(key, seq)) return true;
  for (std::size_t s = 0; s < span_streams_.size(); ++s) {
    const auto& stream = span_streams_[s];
    std::size_t& cur = span_cursors_[s];
    while (cur < stream.size() && stream[cur].key_hi <= key) ++cur;
    if (cur < stream.size() && stream[cur].covers(key, seq)) return true;
  }
  return false;
}

void GloranStore::bottom_compaction(Key lo, Key hi) { maybe_gc(lo, hi); }

void GloranStore::maybe_gc(Key lo, Key hi) {
  ++counters_.gc_runs;
  SequenceNumber w;
  if (auto m = lsm_->min_seq_above_bottom(); m.has_value()) {
    w = *m == kReservedSeq ? kReservedSeq : *m - 1;
  } else {
    w = lsm_->last_sequence();
  }
  if (w > index_.watermark()) index_.advance_watermark(w);
  counters_.gc_purged_leaves += index_.gc(lo, hi);
  // EVE epochs may only be forgotten once none of their deletes remain in the
  // index, otherwise a DefinitelyValid shortcut could resurrect covered data.
  SequenceNumber eve_w;
  if (auto m = index_.min_seq_hi(); m.has_value()) {
    eve_w = *m == kReservedSeq ? kReservedSeq : *m - 1;
  } else {
    eve_w = lsm_->last_sequence();
  }
  eve_.drop_outdated(eve_w);
}

void GloranStore::rebuild_eve() {
  eve_ = Eve(cfg_);
  for (const EffectiveArea& a : index_.all_areas())
    eve_.insert(a.key_lo, a.key_hi, a.seq_hi);
}

std::unique_ptr<KvStore> create_store(const StoreConfig& cfg,
                                      const std::string& dir,
                                      std::shared_ptr<IoStats> stats) {
  if (cfg.strategy == Strategy::kGloran)
    return GloranStore::create(cfg, dir, std::move(stats));
  return std::make_unique<BaselineStore>(
      LsmStore::create(cfg, dir, std::move(stats)));
}

std::unique_ptr<KvStore> open_store(const std::string& dir,
                                    std::shared_ptr<IoStats> stats) {
  StoreConfig cfg = load_config_file(dir + "/config.txt");
  if (cfg.strategy == Strategy::kGloran)
    return GloranStore::open(dir, std::move(stats));
  return std::make_unique<BaselineStore>(
      LsmStore::open(dir, std::move(stats)));
}

}  // namespace gloran
