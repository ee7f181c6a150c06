#include "gloran/lsm_drtree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gloran {

namespace {

std::uint64_t ceil_log(std::uint64_t base, std::uint64_t n) {
  if (n <= 1) return n == 0 ? 0 : 1;
  std::uint64_t l = 0, v = 1;
  while (v < n) {
    v *= base;
    ++l;
  }
  return l;
}

}  // namespace

LsmDRtreeIndex::LsmDRtreeIndex(StoreConfig cfg, std::string dir,
                               std::shared_ptr<IoStats> stats)
    : cfg_(std::move(cfg)), dir_(std::move(dir)), stats_(std::move(stats)) {}

std::uint64_t LsmDRtreeIndex::level_capacity(std::size_t level_idx) const {
  // Nominal capacity F'.T'^i records; disjointization may double the leaves.
  std::uint64_t cap = cfg_.index_buffer_capacity;
  for (std::size_t i = 0; i <= level_idx; ++i) cap *= cfg_.index_size_ratio;
  return 2 * cap;
}

std::string LsmDRtreeIndex::level_path(std::size_t level_idx) const {
  return dir_ + "/idx_" + std::to_string(level_idx + 1) + ".drt";
}

void LsmDRtreeIndex::insert_record(const RangeRecord& r) {
  if (!r.area.valid()) throw StoreError("index: invalid range record");
  buffer_.insert(r.area);
  ++record_count_;
  if (buffer_.size() >= cfg_.index_buffer_capacity) flush_buffer();
}

std::vector<EffectiveArea> LsmDRtreeIndex::merge_disjoint_streams(
    const std::vector<EffectiveArea>& a, const std::vector<EffectiveArea>& b) {
  std::vector<EffectiveArea> out;
  std::vector<EffectiveArea> pending;  // sorted by key_lo, stays tiny
  std::size_t ia = 0, ib = 0;

  auto push_pending = [&](const EffectiveArea& x) {
    auto it = std::lower_bound(pending.begin(), pending.end(), x,
                               [](const EffectiveArea& l,
                                  const EffectiveArea& r) {
                                 return l.key_lo < r.key_lo;
                               });
    pending.insert(it, x);
  };

  // 0 = pending, 1 = a, 2 = b, 3 = none
  auto min_source = [&]() -> int {
    Key best = 0;
    int src = 3;
    if (ia < a.size()) {
      best = a[ia].key_lo;
      src = 1;
    }
    if (ib < b.size() && (src == 3 || b[ib].key_lo < best)) {
      best = b[ib].key_lo;
      src = 2;
    }
    if (!pending.empty() && (src == 3 || pending.front().key_lo <= best))
      src = 0;
    return src;
  };
  auto pop = [&](int src) -> EffectiveArea {
    if (src == 0) {
      EffectiveArea x = pending.front();
      pending.erase(pending.begin());
      return x;
    }
    if (src == 1) return a[ia++];
    return b[ib++];
  };

  while (true) {
    int s1 = min_source();
    if (s1 == 3) break;
    EffectiveArea cur = pop(s1);
    int s2 = min_source();
    if (s2 == 3) {
      out.push_back(cur);
      break;
    }
    const EffectiveArea& nxt_peek =
        s2 == 0 ? pending.front() : (s2 == 1 ? a[ia] : b[ib]);
    if (cur.key_hi <= nxt_peek.key_lo) {
      out.push_back(cur);
      continue;
    }
    EffectiveArea nxt = pop(s2);
    const EffectiveArea& older = cur.seq_hi < nxt.seq_hi ? cur : nxt;
    const EffectiveArea& newer = cur.seq_hi < nxt.seq_hi ? nxt : cur;
    for (const EffectiveArea& piece : disjointize_pair(older, newer))
      push_pending(piece);
  }
  return out;
}

void LsmDRtreeIndex::place_tree(std::size_t level_idx,
                                std::vector<EffectiveArea> areas) {
  while (levels_.size() <= level_idx) levels_.emplace_back(std::nullopt);
  std::string path = level_path(level_idx);
  if (areas.empty()) {
    levels_[level_idx].reset();
    std::error_code ec;
    std::filesystem::remove(path, ec);
    return;
  }
  levels_[level_idx] = DRTree::build(areas, cfg_, path, stats_);
}

void LsmDRtreeIndex::flush_buffer() {
  if (buffer_.empty()) return;
  std::vector<EffectiveArea> areas = sweep_disjointize(buffer_.all_areas());
  buffer_.clear();
  if (!levels_.empty() && levels_[0].has_value()) {
    areas = merge_disjoint_streams(areas, levels_[0]->all_leaves());
  }
  place_tree(0, std::move(areas));
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].has_value() && levels_[i]->leaf_count() > level_capacity(i))
      compact_into(i);
  }
}

void LsmDRtreeIndex::compact_into(std::size_t level_idx) {
  std::vector<EffectiveArea> upper = levels_[level_idx]->all_leaves();
  std::vector<EffectiveArea> lower;
  if (levels_.size() > level_idx + 1 && levels_[level_idx + 1].has_value())
    lower = levels_[level_idx + 1]->all_leaves();
  std::vector<EffectiveArea> merged = merge_disjoint_streams(upper, lower);
  place_tree(level_idx + 1, std::move(merged));
  place_tree(level_idx, {});
}

CheckResult LsmDRtreeIndex::check_deleted(Key key, SequenceNumber seq) const {
  CheckResult res;
  // The write buffer is memory resident: no I/O charged, checked first since
  // it holds the newest records.
  if (buffer_.covers(key, seq)) {
    res.deleted = true;
    return res;
  }
  std::uint64_t bound = 0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!levels_[i].has_value()) continue;
    bound += ceil_log(cfg_.drtree_fanout, level_capacity(i));
    DrQueryResult q = levels_[i]->query_point(key, seq);
    res.node_accesses += q.node_accesses;
    if (q.covered.has_value()) {
      res.deleted = true;
      break;
    }
  }
  if (res.node_accesses > bound) ++access_bound_violations_;
  return res;
}

std::uint64_t LsmDRtreeIndex::access_bound(std::size_t levels) const {
  std::uint64_t bound = 0;
  for (std::size_t i = 0; i < levels; ++i)
    bound += ceil_log(cfg_.drtree_fanout, level_capacity(i));
  return bound;
}

std::vector<std::vector<EffectiveArea>> LsmDRtreeIndex::span_streams(
    Key key_lo, Key key_hi) const {
  std::vector<std::vector<EffectiveArea>> streams;
  for (const auto& lvl : levels_) {
    if (!lvl.has_value()) continue;
    streams.push_back(lvl->iterate(key_lo, key_hi));
  }
  return streams;
}

std::vector<EffectiveArea> LsmDRtreeIndex::all_areas() const {
  std::vector<EffectiveArea> out = buffer_.all_areas();
  for (const auto& lvl : levels_) {
    if (!lvl.has_value()) continue;
    auto leaves = lvl->all_leaves();
    out.insert(out.end(), leaves.begin(), leaves.end());
  }
  return out;
}

void LsmDRtreeIndex::advance_watermark(SequenceNumber w) {
  if (w < watermark_)
    throw StoreError("index: watermark may not move backwards");
  watermark_ = w;
}

std::uint64_t LsmDRtreeIndex::gc(Key keyspan_lo, Key keyspan_hi) {
  // Outdated records concentrate at the bottommost level; GC is confined to
  // it. Areas straddling the keyspan boundary are kept.
  std::size_t bottom = levels_.size();
  for (std::size_t i = levels_.size(); i-- > 0;) {
    if (levels_[i].has_value()) {
      bottom = i;
      break;
    }
  }
  if (bottom == levels_.size()) return 0;
  std::vector<EffectiveArea> leaves = levels_[bottom]->all_leaves();
  std::vector<EffectiveArea> survivors;
  survivors.reserve(leaves.size());
  for (const auto& a : leaves) {
    bool purgeable = a.seq_hi <= watermark_ && keyspan_lo <= a.key_lo &&
                     a.key_hi <= keyspan_hi;
    if (!purgeable) survivors.push_back(a);
  }
  std::uint64_t purged = leaves.size() - survivors.size();
  if (purged > 0) place_tree(bottom, std::move(survivors));
  return purged;
}

std::optional<SequenceNumber> LsmDRtreeIndex::min_seq_hi() const {
  std::optional<SequenceNumber> min;
  auto offer = [&](SequenceNumber s) {
    if (!min.has_value() || s < *min) min = s;
  };
  for (const EffectiveArea& a : buffer_.all_areas()) offer(a.seq_hi);
  for (const auto& lvl : levels_) {
    if (lvl.has_value() && lvl->leaf_count() > 0) offer(lvl->min_seq_hi());
  }
  return min;
}

std::uint64_t LsmDRtreeIndex::total_node_count() const {
  std::uint64_t n = 0;
  for (const auto& lvl : levels_)
    if (lvl.has_value()) n += lvl->node_count();
  return n;
}

std::uint64_t LsmDRtreeIndex::total_leaf_count() const {
  std::uint64_t n = 0;
  for (const auto& lvl : levels_)
    if (lvl.has_value()) n += lvl->leaf_count();
  return n;
}

std::uint64_t LsmDRtreeIndex::disk_bytes() const {
  std::uint64_t n = 0;
  for (const auto& lvl : levels_)
    if (lvl.has_value()) n += lvl->file_bytes();
  return n;
}

void LsmDRtreeIndex::save_manifest() const {
  std::ofstream out(dir_ + "/idx_manifest.txt");
  if (!out) throw StoreError("cannot write index manifest in " + dir_);
  out << "watermark " << watermark_ << "\n";
  out << "record_count " << record_count_ << "\n";
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!levels_[i].has_value()) continue;
    out << "level " << (i + 1) << " idx_" << (i + 1) << ".drt "
        << levels_[i]->leaf_count() << "\n";
  }
}

void LsmDRtreeIndex::load_from_manifest() {
  std::ifstream in(dir_ + "/idx_manifest.txt");
  if (!in) throw StoreError("missing index manifest in " + dir_);
  std::string tag;
  while (in >> tag) {
    if (tag == "watermark") {
      in >> watermark_;
    } else if (tag == "record_count") {
      in >> record_count_;
    } else if (tag == "level") {
      std::size_t level_no;
      std::string file;
      std::uint64_t leaf_count;
      in >> level_no >> file >> leaf_count;
      while (levels_.size() < level_no) levels_.emplace_back(std::nullopt);
      levels_[level_no - 1] =
          DRTree::open(cfg_, dir_ + "/" + file, stats_);
      if (levels_[level_no - 1]->leaf_count() != leaf_count)
        throw StoreError("index manifest leaf count mismatch");
    } else {
      throw StoreError("bad index manifest tag: " + tag);
    }
  }
}

}  // namespace gloran
