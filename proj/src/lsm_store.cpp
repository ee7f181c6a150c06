#include "gloran/lsm_store.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "codec.hpp"

namespace gloran {

namespace {
constexpr std::uint64_t kRunMagic = 0x314e55524c47ull;  // "GLRUN1"
}

// ---------------------------------------------------------------------------
// SortedRun

std::uint64_t SortedRun::entries_per_block() const {
  return cfg_.block_size / cfg_.entry_width;
}

std::uint64_t SortedRun::tomb_records_per_block() const {
  return cfg_.block_size / (2 * cfg_.key_width + 8);
}

std::uint64_t SortedRun::data_offset() const {
  const std::uint64_t B = cfg_.block_size;
  std::uint64_t fence_blocks =
      (fences_.size() * cfg_.key_width + B - 1) / B;
  std::uint64_t bloom_blocks = (bloom_bytes_ + B - 1) / B;
  return B + fence_blocks * B + bloom_blocks * B;
}

std::uint64_t SortedRun::tombstone_offset() const {
  const std::uint64_t epb = entries_per_block();
  std::uint64_t data_blocks = (entry_count_ + epb - 1) / epb;
  return data_offset() + data_blocks * cfg_.block_size;
}

SortedRun SortedRun::write(const StoreConfig& cfg, const std::string& path,
                           std::uint64_t level,
                           const std::vector<Entry>& entries,
                           const std::vector<RangeTombstone>& tombstones,
                           std::shared_ptr<IoStats> stats) {
  for (std::size_t i = 1; i < entries.size(); ++i)
    assert(entries[i - 1].key < entries[i].key);
  for (std::size_t i = 1; i < tombstones.size(); ++i)
    assert(tombstones[i - 1].start <= tombstones[i].start);

  SortedRun run;
  run.cfg_ = cfg;
  run.level_ = level;
  run.entry_count_ = entries.size();
  run.tombstone_count_ = tombstones.size();
  run.device_ =
      std::make_shared<BlockDevice>(path, cfg.block_size, std::move(stats),
                                    true);

  const std::uint64_t B = cfg.block_size;
  const std::uint64_t k = cfg.key_width;
  const std::uint64_t e = cfg.entry_width;
  const std::uint64_t epb = B / e;

  run.min_key_ = entries.empty() ? 0 : entries.front().key;
  run.max_key_ = entries.empty() ? 0 : entries.back().key;
  run.min_seq_ = kReservedSeq;
  for (const Entry& en : entries)
    if (run.min_seq_ == kReservedSeq || en.seq < run.min_seq_)
      run.min_seq_ = en.seq;
  for (const RangeTombstone& t : tombstones)
    if (run.min_seq_ == kReservedSeq || t.seq < run.min_seq_)
      run.min_seq_ = t.seq;

  // Bloom filter over every key in the run, fence = first key per data block.
  std::uint64_t bloom_bits = static_cast<std::uint64_t>(
      std::ceil(cfg.bloom_bits_per_entry *
                static_cast<double>(std::max<std::uint64_t>(
                    1, run.entry_count_))));
  run.bloom_ = BloomFilter(bloom_bits,
                           BloomFilter::hash_count(cfg.bloom_bits_per_entry));
  for (const Entry& en : entries) run.bloom_.insert(en.key);
  run.bloom_bytes_ = run.bloom_.bytes().size();

  for (std::size_t i = 0; i < entries.size(); i += epb)
    run.fences_.push_back(entries[i].key);

  std::vector<std::uint8_t> header(B, 0);
  codec::put_u64le(&header[0], kRunMagic);
  codec::put_u64le(&header[8], level);
  codec::put_u64le(&header[16], run.entry_count_);
  codec::put_u64le(&header[24], run.min_key_);
  codec::put_u64le(&header[32], run.max_key_);
  codec::put_u64le(&header[40], run.fences_.size());
  codec::put_u64le(&header[48], run.bloom_bytes_);
  codec::put_u64le(&header[56], run.tombstone_count_);
  run.device_->write(0, header, IoCounter::kDataWrite);

  // Fence array.
  std::uint64_t fence_blocks = (run.fences_.size() * k + B - 1) / B;
  if (fence_blocks > 0) {
    std::vector<std::uint8_t> buf(fence_blocks * B, 0);
    for (std::size_t i = 0; i < run.fences_.size(); ++i)
      codec::put_key_be(&buf[i * k], k, run.fences_[i]);
    run.device_->write(B, buf, IoCounter::kDataWrite);
  }

  // Bloom bits.
  std::uint64_t bloom_blocks = (run.bloom_bytes_ + B - 1) / B;
  if (bloom_blocks > 0) {
    std::vector<std::uint8_t> buf(bloom_blocks * B, 0);
    std::copy(run.bloom_.bytes().begin(), run.bloom_.bytes().end(),
              buf.begin());
    run.device_->write(B + fence_blocks * B, buf, IoCounter::kDataWrite);
  }

  // Data blocks, entries packed e bytes each.
  std::uint64_t data_off = run.data_offset();
  if (!entries.empty()) {
    std::uint64_t data_blocks = (entries.size() + epb - 1) / epb;
    std::vector<std::uint8_t> buf(B, 0);
    for (std::uint64_t blk = 0; blk < data_blocks; ++blk) {
      std::fill(buf.begin(), buf.end(), 0);
      for (std::uint64_t j = 0; j < epb; ++j) {
        std::uint64_t idx = blk * epb + j;
        if (idx >= entries.size()) break;
        const Entry& en = entries[idx];
        std::uint8_t* p = &buf[j * e];
        codec::put_key_be(p, k, en.key);
        codec::put_u64le(p + k, en.seq);
        p[k + 8] = static_cast<std::uint8_t>(en.kind);
        if (en.kind == EntryKind::kValue) {
          std::size_t n = std::min<std::size_t>(en.value.size(),
                                                cfg.value_size());
          std::memcpy(p + k + 9, en.value.data(), n);
        }
      }
      run.device_->write(data_off + blk * B, buf, IoCounter::kDataWrite);
    }
  }

  // Trailing range tombstone blocks.
  if (!tombstones.empty()) {
    const std::uint64_t rec = 2 * k + 8;
    const std::uint64_t tpb = B / rec;
    std::uint64_t tomb_blocks = (tombstones.size() + tpb - 1) / tpb;
    std::uint64_t tomb_off = run.tombstone_offset();
    std::vector<std::uint8_t> buf(B, 0);
    for (std::uint64_t blk = 0; blk < tomb_blocks; ++blk) {
      std::fill(buf.begin(), buf.end(), 0);
      for (std::uint64_t j = 0; j < tpb; ++j) {
        std::uint64_t idx = blk * tpb + j;
        if (idx >= tombstones.size()) break;
        std::uint8_t* p = &buf[j * rec];
        codec::put_key_be(p, k, tombstones[idx].start);
        codec::put_key_be(p + k, k, tombstones[idx].end);
        codec::put_u64le(p + 2 * k, tombstones[idx].seq);
      }
      run.device_->write(tomb_off + blk * B, buf, IoCounter::kDataWrite);
    }
  }
  run.device_->sync();
  return run;
}

SortedRun SortedRun::open(const StoreConfig& cfg, const std::string& path,
                          std::uint64_t level,
                          std::shared_ptr<IoStats> stats) {
  SortedRun run;
  run.cfg_ = cfg;
  run.device_ =
      std::make_shared<BlockDevice>(path, cfg.block_size, std::move(stats),
                                    false);
  const std::uint64_t B = cfg.block_size;
  const std::uint64_t k = cfg.key_width;
  std::vector<std::uint8_t> header(B, 0);
  run.device_->read(0, header, IoCounter::kDataRead);
  if (codec::get_u64le(&header[0]) != kRunMagic)
    throw StoreError("not a run file: " + path);
  run.level_ = codec::get_u64le(&header[8]);
  if (run.level_ != level) throw StoreError("run level mismatch: " + path);
  run.entry_count_ = codec::get_u64le(&header[16]);
  run.min_key_ = codec::get_u64le(&header[24]);
  run.max_key_ = codec::get_u64le(&header[32]);
  std::uint64_t fence_count = codec::get_u64le(&header[40]);
  run.bloom_bytes_ = codec::get_u64le(&header[48]);
  run.tombstone_count_ = codec::get_u64le(&header[56]);

  std::uint64_t fence_blocks = (fence_count * k + B - 1) / B;
  run.fences_.resize(fence_count);
  if (fence_blocks > 0) {
    std::vector<std::uint8_t> buf(fence_blocks * B, 0);
    run.device_->read(B, buf, IoCounter::kDataRead);
    for (std::uint64_t i = 0; i < fence_count; ++i)
      run.fences_[i] = codec::get_key_be(&buf[i * k], k);
  }
  std::uint64_t bloom_blocks = (run.bloom_bytes_ + B - 1) / B;
  if (bloom_blocks > 0) {
    std::vector<std::uint8_t> buf(bloom_blocks * B, 0);
    run.device_->read(B + fence_blocks * B, buf, IoCounter::kDataRead);
    buf.resize(run.bloom_bytes_);
    run.bloom_ = BloomFilter::from_bytes(
        std::move(buf), BloomFilter::hash_count(cfg.bloom_bits_per_entry));
  }
  return run;
}

std::vector<Entry> SortedRun::decode_block(std::uint64_t block_index) const {
  const std::uint64_t B = cfg_.block_size;
  const std::uint64_t k = cfg_.key_width;
  const std::uint64_t e = cfg_.entry_width;
  const std::uint64_t epb = entries_per_block();
  std::vector<std::uint8_t> buf(B, 0);
  device_->read(data_offset() + block_index * B, buf, IoCounter::kDataRead);
  std::vector<Entry> out;
  std::uint64_t first = block_index * epb;
  std::uint64_t count = std::min(epb, entry_count_ - first);
  out.reserve(count);
  for (std::uint64_t j = 0; j < count; ++j) {
    const std::uint8_t* p = &buf[j * e];
    Entry en;
    en.key = codec::get_key_be(p, k);
    en.seq = codec::get_u64le(p + k);
    en.kind = static_cast<EntryKind>(p[k + 8]);
    if (en.kind == EntryKind::kValue)
      en.value.assign(reinterpret_cast<const char*>(p + k + 9),
                      cfg_.value_size());
    out.push_back(std::move(en));
  }
  return out;
}

std::optional<std::uint64_t> SortedRun::fence_lookup(Key key) const {
  if (fences_.empty() || key < fences_.front()) return std::nullopt;
  auto it = std::upper_bound(fences_.begin(), fences_.end(), key);
  return static_cast<std::uint64_t>(it - fences_.begin() - 1);
}

SortedRun::ProbeResult SortedRun::probe(Key key) const {
  ProbeResult res;
  if (entry_count_ == 0) return res;
  res.bloom_positive = bloom_.may_contain(key);
  if (!res.bloom_positive) return res;
  auto blk = fence_lookup(key);
  if (!blk.has_value()) return res;
  res.data_block_read = true;
  for (Entry& en : decode_block(*blk)) {
    if (en.key == key) {
      res.entry = std::move(en);
      break;
    }
  }
  return res;
}

SortedRun::TombstoneProbe SortedRun::probe_tombstones(Key key) const {
  TombstoneProbe res;
  if (tombstone_count_ == 0) return res;
  // One I/O for the first page, then sequential reads while records keep
  // start keys below the target.
  const std::uint64_t B = cfg_.block_size;
  const std::uint64_t k = cfg_.key_width;
  const std::uint64_t rec = 2 * k + 8;
  const std::uint64_t tpb = tomb_records_per_block();
  std::uint64_t tomb_blocks = (tombstone_count_ + tpb - 1) / tpb;
  std::uint64_t tomb_off = tombstone_offset();
  std::vector<std::uint8_t> buf(B, 0);
  for (std::uint64_t blk = 0; blk < tomb_blocks; ++blk) {
    device_->read(tomb_off + blk * B, buf, IoCounter::kTombstoneRead);
    std::uint64_t count = std::min(tpb, tombstone_count_ - blk * tpb);
    bool past = false;
    for (std::uint64_t j = 0; j < count; ++j) {
      const std::uint8_t* p = &buf[j * rec];
      Key start = codec::get_key_be(p, k);
      Key end = codec::get_key_be(p + k, k);
      SequenceNumber seq = codec::get_u64le(p + 2 * k);
      if (start > key) {
        past = true;
        break;
      }
      if (start < key) ++res.records_examined;
      if (start <= key && key < end)
        res.covering_seq = std::max(res.covering_seq, seq);
    }
    if (past || (blk + 1) * tpb >= tombstone_count_) break;
  }
  return res;
}

std::vector<Entry> SortedRun::read_entries() const {
  std::vector<Entry> out;
  out.reserve(entry_count_);
  const std::uint64_t epb = entries_per_block();
  std::uint64_t blocks = (entry_count_ + epb - 1) / epb;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    auto part = decode_block(b);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<Entry> SortedRun::read_entries_in_range(Key lo, Key hi) const {
  std::vector<Entry> out;
  if (entry_count_ == 0 || lo >= hi || hi <= min_key_ || lo > max_key_)
    return out;
  const std::uint64_t epb = entries_per_block();
  std::uint64_t blocks = (entry_count_ + epb - 1) / epb;
  std::uint64_t first_blk = 0;
  if (auto f = fence_lookup(lo); f.has_value()) first_blk = *f;
  for (std::uint64_t b = first_blk; b < blocks; ++b) {
    bool past = false;
    for (Entry& en : decode_block(b)) {
      if (en.key >= hi) {
        past = true;
        break;
      }
      if (en.key >= lo) out.push_back(std::move(en));
    }
    if (past) break;
  }
  return out;
}

std::vector<RangeTombstone> SortedRun::read_tombstones() const {
  std::vector<RangeTombstone> out;
  if (tombstone_count_ == 0) return out;
  const std::uint64_t B = cfg_.block_size;
  const std::uint64_t k = cfg_.key_width;
  const std::uint64_t rec = 2 * k + 8;
  const std::uint64_t tpb = tomb_records_per_block();
  std::uint64_t blocks = (tombstone_count_ + tpb - 1) / tpb;
  std::uint64_t tomb_off = tombstone_offset();
  std::vector<std::uint8_t> buf(B, 0);
  out.reserve(tombstone_count_);
  for (std::uint64_t blk = 0; blk < blocks; ++blk) {
    device_->read(tomb_off + blk * B, buf, IoCounter::kTombstoneRead);
    std::uint64_t count = std::min(tpb, tombstone_count_ - blk * tpb);
    for (std::uint64_t j = 0; j < count; ++j) {
      const std::uint8_t* p = &buf[j * rec];
      out.push_back({codec::get_key_be(p, k), codec::get_key_be(p + k, k),
                     codec::get_u64le(p + 2 * k)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// LsmStore

LsmStore::LsmStore(StoreConfig cfg, std::string dir,
                   std::shared_ptr<IoStats> stats)
    : cfg_(std::move(cfg)), dir_(std::move(dir)), stats_(std::move(stats)) {}

std::unique_ptr<LsmStore> LsmStore::create(const StoreConfig& cfg,
                                           const std::string& dir,
                                           std::shared_ptr<IoStats> stats) {
  cfg.validate();
  std::filesystem::create_directories(dir);
  auto store =
      std::unique_ptr<LsmStore>(new LsmStore(cfg, dir, std::move(stats)));
  std::ofstream out(dir + "/config.txt");
  if (!out) throw StoreError("cannot write config in " + dir);
  out << config_to_text(cfg);
  out.close();
  store->save_manifest();
  return store;
}

std::unique_ptr<LsmStore> LsmStore::open(const std::string& dir,
                                         std::shared_ptr<IoStats> stats) {
  StoreConfig cfg = load_config_file(dir + "/config.txt");
  auto store =
      std::unique_ptr<LsmStore>(new LsmStore(cfg, dir, std::move(stats)));
  std::ifstream in(dir + "/MANIFEST");
  if (!in) throw StoreError("missing MANIFEST in " + dir);
  std::string tag;
  while (in >> tag) {
    if (tag == "next_seq") {
      SequenceNumber last;
      in >> last;
      store->seq_.restore(last);
    } else if (tag == "level") {
      std::size_t level_no;
      std::string file;
      SequenceNumber min_seq;
      in >> level_no >> file >> min_seq;
      while (store->levels_.size() < level_no)
        store->levels_.emplace_back(std::nullopt);
      store->levels_[level_no - 1] = SortedRun::open(
          cfg, dir + "/" + file, level_no, store->stats_);
      store->levels_[level_no - 1]->set_min_seq(min_seq);
    } else {
      throw StoreError("bad MANIFEST tag: " + tag);
    }
  }
  return store;
}

void LsmStore::save_manifest() const {
  std::ofstream out(dir_ + "/MANIFEST");
  if (!out) throw StoreError("cannot write MANIFEST in " + dir_);
  out << "next_seq " << seq_.last() << "\n";
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!levels_[i].has_value()) continue;
    out << "level " << (i + 1) << " sst_" << (i + 1) << ".run "
        << levels_[i]->min_seq() << "\n";
  }
}

std::string LsmStore::run_path(std::size_t level_idx) const {
  return dir_ + "/sst_" + std::to_string(level_idx + 1) + ".run";
}

std::uint64_t LsmStore::level_capacity(std::size_t level_idx) const {
  std::uint64_t cap = cfg_.memtable_capacity;
  for (std::size_t i = 0; i <= level_idx; ++i) cap *= cfg_.size_ratio;
  return cap;
}

bool LsmStore::is_bottommost(std::size_t level_idx) const {
  for (std::size_t i = level_idx + 1; i < levels_.size(); ++i)
    if (levels_[i].has_value()) return false;
  return true;
}

void LsmStore::put(Key key, const std::string& value) {
  if (key >= cfg_.key_universe) throw StoreError("key outside universe");
  Entry en;
  en.key = key;
  en.seq = seq_.next();
  en.kind = EntryKind::kValue;
  en.value = value;
  en.value.resize(cfg_.value_size(), '\0');
  memtable_[key] = std::move(en);
  maybe_flush();
}

void LsmStore::delete_key(Key key) {
  if (key >= cfg_.key_universe) throw StoreError("key outside universe");
  Entry en;
  en.key = key;
  en.seq = seq_.next();
  en.kind = EntryKind::kTombstone;
  memtable_[key] = std::move(en);
  maybe_flush();
}

void LsmStore::range_delete(Key lo, Key hi) {
  if (lo >= hi) throw StoreError("range_delete: lo must be < hi");
  if (hi > cfg_.key_universe) throw StoreError("range outside universe");
  switch (cfg_.strategy) {
    case Strategy::kDecomp: {
      if (hi - lo > cfg_.decomp_max_expansion)
        throw StoreError("range_delete: expansion over configured cap");
      for (Key k = lo; k < hi; ++k) delete_key(k);
      break;
    }
    case Strategy::kLookupDelete: {
      if (hi - lo > cfg_.decomp_max_expansion)
        throw StoreError("range_delete: expansion over configured cap");
      for (Key k = lo; k < hi; ++k) {
        if (get(k).found()) delete_key(k);
      }
      break;
    }
    case Strategy::kScanDelete: {
      for (const ScanEntry& e : scan(lo, hi)) delete_key(e.key);
      break;
    }
    case Strategy::kLrr: {
      mem_tombstones_.push_back({lo, hi, seq_.next()});
      break;
    }
    case Strategy::kGloran:
      throw StoreError("range_delete under gloran is handled by the engine");
  }
}

void LsmStore::maybe_flush() {
  if (memtable_.size() >= cfg_.memtable_capacity) flush();
}

void LsmStore::flush() {
  if (memtable_.empty() && mem_tombstones_.empty()) return;
  std::vector<Entry> entries;
  entries.reserve(memtable_.size());
  for (auto& [k, en] : memtable_) entries.push_back(std::move(en));
  memtable_.clear();
  std::vector<RangeTombstone> tombs = std::move(mem_tombstones_);
  mem_tombstones_.clear();
  std::sort(tombs.begin(), tombs.end(),
            [](const RangeTombstone& a, const RangeTombstone& b) {
              return a.start < b.start || (a.start == b.start && a.seq < b.seq);
            });
  ++counters_.flushes;
  merge_write(0, std::move(entries), std::move(tombs), true);
  save_manifest();
}

void LsmStore::compact(std::size_t level_idx) {
  std::vector<Entry> entries = levels_[level_idx]->read_entries();
  std::vector<RangeTombstone> tombs = levels_[level_idx]->read_tombstones();
  levels_[level_idx].reset();
  std::error_code ec;
  std::filesystem::remove(run_path(level_idx), ec);
  ++counters_.compactions;
  merge_write(level_idx + 1, std::move(entries), std::move(tombs), false);
}

void LsmStore::merge_write(std::size_t target_idx, std::vector<Entry> upper,
                           std::vector<RangeTombstone> upper_tombs,
                           bool from_flush) {
  while (levels_.size() <= target_idx) levels_.emplace_back(std::nullopt);

  std::vector<Entry> lower;
  std::vector<RangeTombstone> lower_tombs;
  if (levels_[target_idx].has_value()) {
    lower = levels_[target_idx]->read_entries();
    lower_tombs = levels_[target_idx]->read_tombstones();
  }
  bool bottom = is_bottommost(target_idx);

  // Newest version wins; only one version per key is kept (lookups stop at
  // the first version found top-down, so older ones are unreachable).
  std::vector<Entry> merged;
  merged.reserve(upper.size() + lower.size());
  std::size_t iu = 0, il = 0;
  while (iu < upper.size() || il < lower.size()) {
    if (il >= lower.size() ||
        (iu < upper.size() && upper[iu].key < lower[il].key)) {
      merged.push_back(std::move(upper[iu++]));
    } else if (iu >= upper.size() || lower[il].key < upper[iu].key) {
      merged.push_back(std::move(lower[il++]));
    } else {
      merged.push_back(upper[iu].seq > lower[il].seq
                           ? std::move(upper[iu])
                           : std::move(lower[il]));
      ++iu;
      ++il;
    }
  }

  std::vector<RangeTombstone> all_tombs;
  all_tombs.reserve(upper_tombs.size() + lower_tombs.size());
  std::merge(upper_tombs.begin(), upper_tombs.end(), lower_tombs.begin(),
             lower_tombs.end(), std::back_inserter(all_tombs),
             [](const RangeTombstone& a, const RangeTombstone& b) {
               return a.start < b.start ||
                      (a.start == b.start && a.seq < b.seq);
             });

  Key span_lo = 0, span_hi = 0;
  if (!merged.empty()) {
    span_lo = merged.front().key;
    span_hi = merged.back().key + 1;
  }
  if (hook_ && !merged.empty()) hook_->begin_span(span_lo, span_hi);

  std::vector<Entry> output;
  output.reserve(merged.size());
  for (Entry& en : merged) {
    // Purge entries invalidated by a newer local range tombstone.
    bool covered = false;
    for (const RangeTombstone& t : all_tombs) {
      if (t.start > en.key) break;
      if (en.key < t.end && t.seq > en.seq) {
        covered = true;
        break;
      }
    }
    if (covered) continue;
    if (hook_ && en.kind == EntryKind::kValue &&
        hook_->should_drop(en.key, en.seq))
      continue;
    // A point tombstone expires once it reaches the bottommost level.
    if (en.kind == EntryKind::kTombstone && bottom) continue;
    output.push_back(std::move(en));
  }
  // Range tombstones expire at the bottommost level as well.
  if (bottom) all_tombs.clear();

  if (output.empty() && all_tombs.empty()) {
    levels_[target_idx].reset();
    std::error_code ec;
    std::filesystem::remove(run_path(target_idx), ec);
  } else {
    levels_[target_idx] = SortedRun::write(
        cfg_, run_path(target_idx), target_idx + 1, output, all_tombs, stats_);
  }

  (void)from_flush;
  if (hook_ && bottom && !merged.empty())
    hook_->bottom_compaction(span_lo, span_hi);

  if (levels_[target_idx].has_value() &&
      levels_[target_idx]->entry_count() > level_capacity(target_idx)) {
    compact(target_idx);
  }
  save_manifest();
}

LookupResult LsmStore::get(Key key) {
  ++counters_.gets;
  SequenceNumber best_tomb = kReservedSeq;
  for (const RangeTombstone& t : mem_tombstones_) {
    if (t.start <= key && key < t.end) best_tomb = std::max(best_tomb, t.seq);
  }
  auto decide = [&](const Entry& en) {
    LookupResult r;
    if (best_tomb > en.seq) {
      r.outcome = LookupOutcome::kDeletedByRange;
    } else if (en.kind == EntryKind::kTombstone) {
      r.outcome = LookupOutcome::kDeletedByTombstone;
    } else {
      r.outcome = LookupOutcome::kFound;
      r.value = en.value;
      r.seq = en.seq;
    }
    return r;
  };

  if (auto it = memtable_.find(key); it != memtable_.end())
    return decide(it->second);

  for (const auto& run : levels_) {
    if (!run.has_value()) continue;
    if (cfg_.strategy == Strategy::kLrr) {
      auto tp = run->probe_tombstones(key);
      counters_.tombstone_records_examined += tp.records_examined;
      best_tomb = std::max(best_tomb, tp.covering_seq);
    }
    ++counters_.bloom_probes;
    auto pr = run->probe(key);
    if (pr.bloom_positive) {
      ++counters_.bloom_positives;
      if (!pr.entry.has_value()) ++counters_.bloom_false_positives;
    }
    if (pr.entry.has_value()) return decide(*pr.entry);
  }
  LookupResult r;
  r.outcome = best_tomb != kReservedSeq ? LookupOutcome::kDeletedByRange
                                        : LookupOutcome::kNotFound;
  return r;
}

std::vector<ScanEntry> LsmStore::scan(Key lo, Key hi) {
  if (lo >= hi) throw StoreError("scan: lo must be < hi");
  std::map<Key, Entry> best;
  auto offer = [&](Entry en) {
    auto it = best.find(en.key);
    if (it == best.end() || it->second.seq < en.seq)
      best[en.key] = std::move(en);
  };
  for (auto it = memtable_.lower_bound(lo);
       it != memtable_.end() && it->first < hi; ++it)
    offer(it->second);
  std::vector<RangeTombstone> tombs = mem_tombstones_;
  for (const auto& run : levels_) {
    if (!run.has_value()) continue;
    for (Entry& en : run->read_entries_in_range(lo, hi)) offer(std::move(en));
    if (cfg_.strategy == Strategy::kLrr) {
      auto rt = run->read_tombstones();
      tombs.insert(tombs.end(), rt.begin(), rt.end());
    }
  }
  std::vector<ScanEntry> out;
  for (auto& [k, en] : best) {
    if (en.kind == EntryKind::kTombstone) continue;
    bool covered = false;
    for (const RangeTombstone& t : tombs) {
      if (t.start <= k && k < t.end && t.seq > en.seq) {
        covered = true;
        break;
      }
    }
    if (!covered)
      out.push_back({k, en.seq, std::move(en.value)});
  }
  return out;
}

std::optional<SequenceNumber> LsmStore::min_seq_above_bottom() const {
  std::optional<SequenceNumber> min;
  auto offer = [&](SequenceNumber s) {
    if (s == kReservedSeq) return;
    if (!min.has_value() || s < *min) min = s;
  };
  for (const auto& [k, en] : memtable_) offer(en.seq);
  for (const RangeTombstone& t : mem_tombstones_) offer(t.seq);
  std::size_t bottom = levels_.size();
  for (std::size_t i = levels_.size(); i-- > 0;) {
    if (levels_[i].has_value()) {
      bottom = i;
      break;
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i == bottom || !levels_[i].has_value()) continue;
    offer(levels_[i]->min_seq());
  }
  return min;
}

std::optional<SequenceNumber> LsmStore::min_live_seq() const {
  std::optional<SequenceNumber> min;
  auto offer = [&](SequenceNumber s) {
    if (s == kReservedSeq) return;
    if (!min.has_value() || s < *min) min = s;
  };
  for (const auto& [k, en] : memtable_) offer(en.seq);
  for (const RangeTombstone& t : mem_tombstones_) offer(t.seq);
  for (const auto& run : levels_)
    if (run.has_value()) offer(run->min_seq());
  return min;
}

std::uint64_t LsmStore::total_entries() const {
  std::uint64_t n = memtable_.size();
  for (const auto& run : levels_)
    if (run.has_value()) n += run->entry_count();
  return n;
}

std::uint64_t LsmStore::disk_bytes() const {
  std::uint64_t n = 0;
  for (const auto& run : levels_)
    if (run.has_value()) n += run->file_bytes();
  return n;
}

void LsmStore::force_flush_and_compact_to_bottom() {
  flush();
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].has_value() && !is_bottommost(i)) compact(i);
  }
  // Push the single remaining run down once so a bottommost compaction event
  // fires even when everything already sat in one level.
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].has_value()) {
      compact(i);
      break;
    }
  }
  save_manifest();
}

}  // namespace gloran
