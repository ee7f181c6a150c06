#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "gloran/lsm_drtree.hpp"
#include "test_support.hpp"

using namespace gloran;
using gloran_test::TempDir;

namespace {

StoreConfig index_cfg(std::uint64_t buffer_cap = 16,
                      std::uint64_t size_ratio = 4) {
  StoreConfig cfg;
  cfg.index_buffer_capacity = buffer_cap;
  cfg.index_size_ratio = size_ratio;
  cfg.drtree_fanout = 10;
  return cfg;
}

EffectiveArea random_area(std::mt19937_64& rng, Key universe,
                          SequenceNumber* seq) {
  EffectiveArea a;
  a.key_lo = rng() % (universe - 1);
  a.key_hi = std::min<Key>(universe, a.key_lo + 1 + rng() % (universe / 8));
  a.seq_lo = 0;
  a.seq_hi = ++*seq;
  return a;
}

// Truth for check_deleted: some inserted record covers the probe.
bool brute_covered(const std::vector<EffectiveArea>& inserted, Key k,
                   SequenceNumber s) {
  for (const auto& a : inserted)
    if (a.covers(k, s)) return true;
  return false;
}

SequenceNumber dominant(const std::vector<EffectiveArea>& areas, Key k) {
  SequenceNumber best = 0;
  for (const auto& a : areas)
    if (a.key_lo <= k && k < a.key_hi) best = std::max(best, a.seq_hi);
  return best;
}

}  // namespace

TEST_CASE("rtree buffer covers matches brute force") {
  std::mt19937_64 rng(3);
  RTreeBuffer buf;
  std::vector<EffectiveArea> inserted;
  SequenceNumber seq = 0;
  for (int i = 0; i < 300; ++i) {
    auto a = random_area(rng, 512, &seq);
    buf.insert(a);
    inserted.push_back(a);
  }
  CHECK(buf.size() == inserted.size());
  // quadratic split invariant: both halves hold >= ceil(c/2)-1 entries
  CHECK(buf.min_split_fill() >= (RTreeBuffer::kNodeCapacity + 1) / 2 - 1);

  for (int probe = 0; probe < 3000; ++probe) {
    Key k = rng() % 520;
    SequenceNumber s = rng() % (seq + 2);
    CHECK(buf.covers(k, s) == brute_covered(inserted, k, s));
  }

  auto all = buf.all_areas();
  CHECK(all.size() == inserted.size());
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.seq_hi < b.seq_hi;
  });
  CHECK(all == inserted);

  buf.clear();
  CHECK(buf.empty());
  CHECK(!buf.covers(0, 0));
}

TEST_CASE("merge_disjoint_streams equals sweep of the union") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    SequenceNumber seq = 0;
    std::vector<EffectiveArea> xs, ys;
    for (int i = 0; i < 20; ++i) xs.push_back(random_area(rng, 256, &seq));
    for (int i = 0; i < 20; ++i) ys.push_back(random_area(rng, 256, &seq));
    auto a = sweep_disjointize(xs);
    auto b = sweep_disjointize(ys);
    auto merged = LsmDRtreeIndex::merge_disjoint_streams(a, b);

    // output disjoint and sorted
    for (std::size_t i = 1; i < merged.size(); ++i)
      CHECK(merged[i - 1].key_hi <= merged[i].key_lo);

    // per-key dominance equals the sweep of the union
    std::vector<EffectiveArea> uni = a;
    uni.insert(uni.end(), b.begin(), b.end());
    for (Key k = 0; k < 256; ++k)
      CHECK(dominant(merged, k) == dominant(uni, k));
  }
}

TEST_CASE("index flush, levels and capacities") {
  TempDir dir("idx_flush");
  StoreConfig cfg = index_cfg(8, 3);
  auto stats = std::make_shared<IoStats>();
  LsmDRtreeIndex idx(cfg, dir.str(), stats);

  std::mt19937_64 rng(12);
  SequenceNumber seq = 0;
  for (int i = 0; i < 7; ++i) {
    idx.insert_record({random_area(rng, 1024, &seq)});
  }
  CHECK(idx.buffer_size() == 7);
  CHECK(idx.level_count() == 0);  // nothing flushed yet

  idx.insert_record({random_area(rng, 1024, &seq)});
  CHECK(idx.buffer_size() == 0);
  REQUIRE(idx.level_count() >= 1);
  CHECK(idx.level_tree(0).has_value());

  for (int i = 0; i < 400; ++i)
    idx.insert_record({random_area(rng, 1024, &seq)});
  // every occupied level within its doubled capacity
  for (std::size_t i = 0; i < idx.level_count(); ++i) {
    if (!idx.level_tree(i).has_value()) continue;
    std::uint64_t cap = 2 * cfg.index_buffer_capacity;
    for (std::size_t j = 0; j <= i; ++j) cap *= cfg.index_size_ratio;
    CHECK(idx.level_tree(i)->leaf_count() <= cap);
  }
}

TEST_CASE("check_deleted equals brute force over inserted records") {
  TempDir dir("idx_check");
  StoreConfig cfg = index_cfg(16, 4);
  auto stats = std::make_shared<IoStats>();
  LsmDRtreeIndex idx(cfg, dir.str(), stats);

  std::mt19937_64 rng(21);
  std::vector<EffectiveArea> inserted;
  SequenceNumber seq = 0;
  for (int i = 0; i < 600; ++i) {
    auto a = random_area(rng, 2048, &seq);
    idx.insert_record({a});
    inserted.push_back(a);

    if (i % 7 == 0) {
      for (int probe = 0; probe < 20; ++probe) {
        Key k = rng() % 2060;
        SequenceNumber s = rng() % (seq + 2);
        CheckResult res = idx.check_deleted(k, s);
        CHECK(res.deleted == brute_covered(inserted, k, s));
      }
    }
  }
  CHECK(idx.access_bound_violations() == 0);
  CHECK(idx.record_count() == inserted.size());
}

TEST_CASE("gc drops only fully outdated leaves inside the keyspan") {
  TempDir dir("idx_gc");
  StoreConfig cfg = index_cfg(4, 3);
  auto stats = std::make_shared<IoStats>();
  LsmDRtreeIndex idx(cfg, dir.str(), stats);

  // Old deletes across [0, 400), then a newer one far away.
  SequenceNumber seq = 0;
  std::vector<EffectiveArea> inserted;
  for (Key lo = 0; lo < 400; lo += 50) {
    EffectiveArea a{lo, lo + 40, 0, ++seq};
    idx.insert_record({a});
    inserted.push_back(a);
  }
  EffectiveArea recent{900, 950, 0, seq + 100};
  idx.insert_record({recent});
  inserted.push_back(recent);
  seq += 100;
  idx.flush_buffer();

  idx.advance_watermark(8);  // everything but the recent record is below
  CHECK_THROWS_AS(idx.advance_watermark(5), StoreError);

  std::uint64_t purged = idx.gc(0, 1024);
  CHECK(purged > 0);

  // Safety: probes above the watermark still agree with brute force over the
  // still-live records.
  std::mt19937_64 rng(2);
  for (int probe = 0; probe < 2000; ++probe) {
    Key k = rng() % 1024;
    SequenceNumber s = 9 + rng() % 200;
    CHECK(idx.check_deleted(k, s).deleted == brute_covered(inserted, k, s));
  }

  // The recent record survived.
  CHECK(idx.check_deleted(920, 5).deleted);
}

TEST_CASE("gc keeps straddlers") {
  TempDir dir("idx_straddle");
  StoreConfig cfg = index_cfg(4, 3);
  auto stats = std::make_shared<IoStats>();
  LsmDRtreeIndex idx(cfg, dir.str(), stats);
  idx.insert_record({EffectiveArea{10, 60, 0, 1}});
  idx.flush_buffer();
  idx.advance_watermark(5);
  // keyspan cuts through the middle of the area: conservative keep
  CHECK(idx.gc(0, 30) == 0);
  CHECK(idx.check_deleted(20, 0).deleted);
  // full cover: dropped
  CHECK(idx.gc(0, 100) == 1);
  CHECK(!idx.check_deleted(20, 0).deleted);
}

TEST_CASE("manifest round-trip") {
  TempDir dir("idx_manifest");
  StoreConfig cfg = index_cfg(8, 3);
  auto stats = std::make_shared<IoStats>();
  std::vector<EffectiveArea> inserted;
  {
    LsmDRtreeIndex idx(cfg, dir.str(), stats);
    std::mt19937_64 rng(33);
    SequenceNumber seq = 0;
    for (int i = 0; i < 200; ++i) {
      auto a = random_area(rng, 512, &seq);
      idx.insert_record({a});
      inserted.push_back(a);
    }
    idx.flush_buffer();
    idx.advance_watermark(17);
    idx.save_manifest();
  }
  LsmDRtreeIndex idx(cfg, dir.str(), stats);
  idx.load_from_manifest();
  CHECK(idx.watermark() == 17);
  std::mt19937_64 rng(34);
  for (int probe = 0; probe < 1000; ++probe) {
    Key k = rng() % 520;
    SequenceNumber s = rng() % 220;
    CHECK(idx.check_deleted(k, s).deleted == brute_covered(inserted, k, s));
  }
}
