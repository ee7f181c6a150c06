#include "gloran/dr_tree.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>

#include "codec.hpp"

namespace gloran {

namespace {

constexpr std::uint64_t kDrMagic = 0x31305452444c47ull;  // "GLDRT01"

std::atomic<std::uint64_t> g_builds{0};
std::atomic<std::uint64_t> g_space_violations{0};
std::atomic<std::uint64_t> g_queries{0};
std::atomic<std::uint64_t> g_height_violations{0};

}  // namespace

std::uint64_t DRTree::audit_builds() { return g_builds.load(); }
std::uint64_t DRTree::audit_space_violations() {
  return g_space_violations.load();
}
std::uint64_t DRTree::audit_queries() { return g_queries.load(); }
std::uint64_t DRTree::audit_height_violations() {
  return g_height_violations.load();
}

std::uint64_t DRTree::slots_per_node() const { return fanout_; }

std::uint64_t DRTree::level_offset(std::uint64_t level) const {
  return level_offsets_[level - 1];
}

DRTree DRTree::build(const std::vector<EffectiveArea>& areas,
                     const StoreConfig& cfg, const std::string& path,
                     std::shared_ptr<IoStats> stats) {
  for (std::size_t i = 0; i < areas.size(); ++i) {
    if (!areas[i].valid()) throw StoreError("DR-tree build: invalid area");
    if (i > 0 && areas[i - 1].key_hi > areas[i].key_lo)
      throw StoreError("DR-tree build: input not sorted and disjoint");
  }

  DRTree t;
  t.path_ = path;
  t.block_size_ = cfg.block_size;
  t.key_width_ = cfg.key_width;
  t.fanout_ = cfg.drtree_fanout;
  t.device_ = std::make_shared<BlockDevice>(path, cfg.block_size,
                                            std::move(stats), true);
  t.leaf_count_ = areas.size();

  const std::uint64_t D = cfg.drtree_fanout;
  const std::uint64_t B = cfg.block_size;
  const std::uint64_t k = cfg.key_width;
  const std::uint64_t slot_bytes = 2 * k + 24;

  // Pack levels bottom-up: leaf blocks of up to D areas, then parents of up
  // to D child slots, until a single root block remains.
  struct RawSlot {
    Key key_lo, key_hi;
    SequenceNumber seq_lo, seq_hi;
    std::uint64_t child;
  };
  using Level = std::vector<std::vector<RawSlot>>;  // blocks of slots
  std::vector<Level> levels;                        // bottom first

  if (!areas.empty()) {
    Level bottom;
    for (std::size_t i = 0; i < areas.size(); i += D) {
      std::vector<RawSlot> block;
      for (std::size_t j = i; j < areas.size() && j < i + D; ++j) {
        block.push_back({areas[j].key_lo, areas[j].key_hi, areas[j].seq_lo,
                         areas[j].seq_hi, 0});
      }
      bottom.push_back(std::move(block));
    }
    levels.push_back(std::move(bottom));
    while (levels.back().size() > 1) {
      const Level& child_level = levels.back();
      Level parent;
      for (std::size_t i = 0; i < child_level.size(); i += D) {
        std::vector<RawSlot> block;
        for (std::size_t j = i; j < child_level.size() && j < i + D; ++j) {
          const auto& cb = child_level[j];
          RawSlot s{cb.front().key_lo, cb.back().key_hi, cb.front().seq_lo,
                    cb.front().seq_hi, j};
          for (const auto& c : cb) {
            s.seq_lo = std::min(s.seq_lo, c.seq_lo);
            s.seq_hi = std::max(s.seq_hi, c.seq_hi);
          }
          block.push_back(s);
        }
        parent.push_back(std::move(block));
      }
      levels.push_back(std::move(parent));
    }
  }

  t.height_ = levels.size();
  t.min_seq_hi_ = 0;
  t.max_seq_hi_ = 0;
  if (!areas.empty()) {
    t.min_seq_hi_ = areas.front().seq_hi;
    for (const auto& a : areas) {
      t.min_seq_hi_ = std::min(t.min_seq_hi_, a.seq_hi);
      t.max_seq_hi_ = std::max(t.max_seq_hi_, a.seq_hi);
    }
  }
  // Conceptual nodes: every leaf area plus every block above the leaf level.
  t.node_count_ = t.leaf_count_;
  for (std::size_t li = 1; li < levels.size(); ++li)
    t.node_count_ += levels[li].size();

  // Serialize root-first. Level 1 = root begins at block 1.
  t.level_node_counts_.assign(t.height_, 0);
  t.level_offsets_.assign(t.height_, 0);
  std::uint64_t next_block = 1;
  for (std::uint64_t lvl = 1; lvl <= t.height_; ++lvl) {
    const Level& l = levels[t.height_ - lvl];
    t.level_node_counts_[lvl - 1] = l.size();
    t.level_offsets_[lvl - 1] = next_block * B;
    next_block += l.size();
  }

  std::vector<std::uint8_t> header(B, 0);
  codec::put_u64le(&header[0], kDrMagic);
  codec::put_u64le(&header[8], t.height_);
  codec::put_u64le(&header[16], t.leaf_count_);
  codec::put_u64le(&header[24], t.node_count_);
  codec::put_u64le(&header[32], t.min_seq_hi_);
  codec::put_u64le(&header[40], t.max_seq_hi_);
  for (std::uint64_t lvl = 0; lvl < t.height_; ++lvl) {
    codec::put_u64le(&header[48 + lvl * 16], t.level_node_counts_[lvl]);
    codec::put_u64le(&header[56 + lvl * 16], t.level_offsets_[lvl]);
  }
  t.device_->write(0, header, IoCounter::kIndexWrite);

  std::vector<std::uint8_t> buf(B, 0);
  for (std::uint64_t lvl = 1; lvl <= t.height_; ++lvl) {
    const Level& l = levels[t.height_ - lvl];
    for (std::size_t ni = 0; ni < l.size(); ++ni) {
      std::memset(buf.data(), 0, B);
      codec::put_u64le(&buf[0], l[ni].size());
      std::uint64_t off = 8;
      for (const RawSlot& s : l[ni]) {
        codec::put_key_be(&buf[off], k, s.key_lo);
        codec::put_key_be(&buf[off + k], k, s.key_hi);
        codec::put_u64le(&buf[off + 2 * k], s.seq_lo);
        codec::put_u64le(&buf[off + 2 * k + 8], s.seq_hi);
        codec::put_u64le(&buf[off + 2 * k + 16], s.child);
        off += slot_bytes;
      }
      t.device_->write(t.level_offsets_[lvl - 1] + ni * B, buf,
                       IoCounter::kIndexWrite);
    }
  }
  t.device_->sync();
  ++g_builds;
  if (t.leaf_count_ > 0) {
    double bound = static_cast<double>(D) / static_cast<double>(D - 1) *
                   static_cast<double>(t.leaf_count_);
    if (static_cast<double>(t.node_count_) > bound) ++g_space_violations;
  }
  return t;
}

DRTree DRTree::open(const StoreConfig& cfg, const std::string& path,
                    std::shared_ptr<IoStats> stats) {
  DRTree t;
  t.path_ = path;
  t.block_size_ = cfg.block_size;
  t.key_width_ = cfg.key_width;
  t.fanout_ = cfg.drtree_fanout;
  t.device_ = std::make_shared<BlockDevice>(path, cfg.block_size,
                                            std::move(stats), false);
  std::vector<std::uint8_t> header(cfg.block_size, 0);
  t.device_->read(0, header, IoCounter::kIndexRead);
  if (codec::get_u64le(&header[0]) != kDrMagic)
    throw StoreError("not a DR-tree file: " + path);
  t.height_ = codec::get_u64le(&header[8]);
  t.leaf_count_ = codec::get_u64le(&header[16]);
  t.node_count_ = codec::get_u64le(&header[24]);
  t.min_seq_hi_ = codec::get_u64le(&header[32]);
  t.max_seq_hi_ = codec::get_u64le(&header[40]);
  t.level_node_counts_.assign(t.height_, 0);
  t.level_offsets_.assign(t.height_, 0);
  for (std::uint64_t lvl = 0; lvl < t.height_; ++lvl) {
    t.level_node_counts_[lvl] = codec::get_u64le(&header[48 + lvl * 16]);
    t.level_offsets_[lvl] = codec::get_u64le(&header[56 + lvl * 16]);
  }
  return t;
}

std::vector<DRTree::Slot> DRTree::read_node(std::uint64_t level,
                                            std::uint64_t index) const {
  std::vector<std::uint8_t> buf(block_size_, 0);
  device_->read(level_offset(level) + index * block_size_, buf,
                IoCounter::kIndexRead);
  std::uint64_t count = codec::get_u64le(&buf[0]);
  const std::uint64_t k = key_width_;
  const std::uint64_t slot_bytes = 2 * k + 24;
  std::vector<Slot> slots;
  slots.reserve(count);
  std::uint64_t off = 8;
  for (std::uint64_t i = 0; i < count; ++i) {
    Slot s;
    s.key_lo = codec::get_key_be(&buf[off], k);
    s.key_hi = codec::get_key_be(&buf[off + k], k);
    s.seq_lo = codec::get_u64le(&buf[off + 2 * k]);
    s.seq_hi = codec::get_u64le(&buf[off + 2 * k + 8]);
    s.child = codec::get_u64le(&buf[off + 2 * k + 16]);
    slots.push_back(s);
    off += slot_bytes;
  }
  return slots;
}

namespace {

struct QueryAudit {
  const std::uint64_t* accesses;
  std::uint64_t height;
  ~QueryAudit() {
    ++g_queries;
    if (*accesses > height) ++g_height_violations;
  }
};

}  // namespace

DrQueryResult DRTree::query_point(Key key, SequenceNumber seq) const {
  DrQueryResult res;
  QueryAudit audit{&res.node_accesses, height_};
  if (leaf_count_ == 0) return res;
  std::uint64_t node = 0;
  for (std::uint64_t lvl = 1; lvl <= height_; ++lvl) {
    auto slots = read_node(lvl, node);
    ++res.node_accesses;
    // Slots are key-sorted and disjoint: the last slot starting at or before
    // the key is the only candidate.
    auto it = std::upper_bound(
        slots.begin(), slots.end(), key,
        [](Key k2, const Slot& s) { return k2 < s.key_lo; });
    if (it == slots.begin()) return res;
    const Slot& s = *(it - 1);
    if (key >= s.key_hi) return res;
    if (seq >= s.seq_hi || seq < s.seq_lo) return res;  // time dimension miss
    if (lvl == height_) {
      res.covered = EffectiveArea{s.key_lo, s.key_hi, s.seq_lo, s.seq_hi};
      return res;
    }
    node = s.child;
  }
  return res;
}

std::vector<EffectiveArea> DRTree::iterate(Key key_lo, Key key_hi) const {
  std::vector<EffectiveArea> out;
  if (leaf_count_ == 0 || key_lo >= key_hi) return out;
  // Locate the first candidate leaf block by descent, then read the leaf
  // level sequentially.
  std::uint64_t node = 0;
  for (std::uint64_t lvl = 1; lvl < height_; ++lvl) {
    auto slots = read_node(lvl, node);
    std::uint64_t chosen = slots.front().child;
    for (const Slot& s : slots) {
      if (s.key_hi > key_lo) {
        chosen = s.child;
        break;
      }
      chosen = s.child;  // span past everything: last child
    }
    node = chosen;
  }
  for (std::uint64_t blk = node; blk < level_node_counts_[height_ - 1];
       ++blk) {
    auto slots = read_node(height_, blk);
    bool past_end = false;
    for (const Slot& s : slots) {
      if (s.key_lo >= key_hi) {
        past_end = true;
        break;
      }
      if (s.key_hi > key_lo)
        out.push_back({s.key_lo, s.key_hi, s.seq_lo, s.seq_hi});
    }
    if (past_end) break;
  }
  return out;
}

std::vector<EffectiveArea> DRTree::all_leaves() const {
  std::vector<EffectiveArea> out;
  if (leaf_count_ == 0) return out;
  out.reserve(leaf_count_);
  for (std::uint64_t blk = 0; blk < level_node_counts_[height_ - 1]; ++blk) {
    for (const Slot& s : read_node(height_, blk))
      out.push_back({s.key_lo, s.key_hi, s.seq_lo, s.seq_hi});
  }
  return out;
}

}  // namespace gloran
