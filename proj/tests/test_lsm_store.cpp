#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <random>

#include "doctest.h"
#include "gloran/lsm_store.hpp"
#include "test_support.hpp"

using namespace gloran;
using gloran_test::TempDir;

namespace {

StoreConfig tiny_cfg(Strategy s, std::uint64_t memtable = 8,
                     std::uint64_t ratio = 2) {
  StoreConfig cfg;
  cfg.memtable_capacity = memtable;
  cfg.size_ratio = ratio;
  cfg.key_universe = 1 << 16;
  cfg.strategy = s;
  return cfg;
}

std::string padded(const std::string& v, const StoreConfig& cfg) {
  std::string out = v;
  out.resize(cfg.value_size(), '\0');
  return out;
}

}  // namespace

TEST_CASE("memtable flushes at capacity into a level-1 run") {
  TempDir dir("lsm_flush");
  StoreConfig cfg = tiny_cfg(Strategy::kDecomp, 4);
  auto stats = std::make_shared<IoStats>();
  auto store = LsmStore::create(cfg, dir.str(), stats);

  store->put(1, "a");
  store->put(2, "b");
  store->put(3, "c");
  CHECK(store->memtable_size() == 3);
  CHECK(stats->data_block_writes == 0);
  store->put(4, "d");
  CHECK(store->memtable_size() == 0);
  REQUIRE(store->level_count() >= 1);
  REQUIRE(store->level_run(0).has_value());
  CHECK(store->level_run(0)->entry_count() == 4);
  CHECK(stats->data_block_writes > 0);

  // duplicate keys in the memtable collapse to the newest
  store->put(5, "x");
  store->put(5, "y");
  CHECK(store->memtable_size() == 1);
  auto r = store->get(5);
  REQUIRE(r.found());
  CHECK(r.value == padded("y", cfg));
}

TEST_CASE("run file round-trip with probe") {
  TempDir dir("run_io");
  StoreConfig cfg = tiny_cfg(Strategy::kLrr);
  auto stats = std::make_shared<IoStats>();

  std::vector<Entry> entries;
  for (Key k = 0; k < 500; ++k) {
    Entry e;
    e.key = k * 3;
    e.seq = k + 1;
    e.kind = k % 7 == 0 ? EntryKind::kTombstone : EntryKind::kValue;
    if (e.kind == EntryKind::kValue) e.value = padded("v" + std::to_string(k), cfg);
    entries.push_back(e);
  }
  std::vector<RangeTombstone> tombs{{10, 50, 600}, {100, 130, 601}};
  SortedRun w = SortedRun::write(cfg, dir.file("r.run"), 1, entries, tombs,
                                 stats);
  CHECK(w.entry_count() == 500);
  CHECK(w.tombstone_count() == 2);
  CHECK(w.min_key() == 0);
  CHECK(w.max_key() == 499 * 3);
  CHECK(w.min_seq() == 1);

  SortedRun r = SortedRun::open(cfg, dir.file("r.run"), 1, stats);
  CHECK(r.entry_count() == 500);
  CHECK(r.read_entries().size() == 500);
  auto back = r.read_entries();
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].key == entries[i].key);
    CHECK(back[i].seq == entries[i].seq);
    CHECK(back[i].kind == entries[i].kind);
    if (back[i].kind == EntryKind::kValue)
      CHECK(back[i].value == entries[i].value);
  }
  CHECK(r.read_tombstones().size() == 2);

  // point probe reads exactly one data block on a bloom positive
  std::uint64_t before = stats->data_block_reads;
  auto pr = r.probe(42);  // key 42 = 14*3 present
  CHECK(pr.bloom_positive);
  REQUIRE(pr.entry.has_value());
  CHECK(pr.entry->key == 42);
  CHECK(stats->data_block_reads - before == 1);

  // absent keys with a negative bloom cost nothing
  int fp_reads = 0;
  before = stats->data_block_reads;
  int negatives = 0;
  for (Key k = 1; k < 1500; k += 3) {  // all absent
    auto miss = r.probe(k);
    CHECK(!miss.entry.has_value());
    if (!miss.bloom_positive) ++negatives;
  }
  fp_reads = static_cast<int>(stats->data_block_reads - before);
  CHECK(negatives > 400);  // bloom does its job
  CHECK(fp_reads < 60);
}

TEST_CASE("tombstone probe examines exactly the records below the target") {
  TempDir dir("tomb_probe");
  StoreConfig cfg = tiny_cfg(Strategy::kLrr);
  auto stats = std::make_shared<IoStats>();

  std::vector<RangeTombstone> tombs;
  for (Key i = 0; i < 400; ++i) tombs.push_back({i * 10, i * 10 + 5, i + 1});
  SortedRun run = SortedRun::write(cfg, dir.file("t.run"), 1, {}, tombs,
                                   stats);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    Key target = rng() % 4200;
    std::uint64_t expect = 0;
    SequenceNumber cover = 0;
    for (const auto& t : tombs) {
      if (t.start < target) ++expect;
      if (t.start <= target && target < t.end)
        cover = std::max(cover, t.seq);
    }
    std::uint64_t before = stats->tombstone_block_reads;
    auto res = run.probe_tombstones(target);
    CHECK(res.records_examined == expect);
    CHECK(res.covering_seq == cover);
    // charged at least the first page, at most the whole prefix
    std::uint64_t charged = stats->tombstone_block_reads - before;
    CHECK(charged >= 1);
    std::uint64_t per_block = cfg.block_size / (2 * cfg.key_width + 8);
    CHECK(charged <= expect / per_block + 2);
  }
}

TEST_CASE("point operations agree with a map oracle under every strategy") {
  for (Strategy s : {Strategy::kDecomp, Strategy::kScanDelete,
                     Strategy::kLookupDelete, Strategy::kLrr}) {
    CAPTURE(to_string(s));
    TempDir dir("lsm_oracle");
    StoreConfig cfg = tiny_cfg(s, 16, 3);
    auto stats = std::make_shared<IoStats>();
    auto store = LsmStore::create(cfg, dir.str(), stats);
    std::map<Key, std::string> oracle;
    std::mt19937_64 rng(s == Strategy::kLrr ? 8 : 9);
    const Key universe = 400;

    for (int op = 0; op < 4000; ++op) {
      int what = static_cast<int>(rng() % 100);
      Key k = rng() % universe;
      if (what < 45) {
        std::string v = "v" + std::to_string(rng() % 1000);
        store->put(k, v);
        oracle[k] = v;
      } else if (what < 55) {
        store->delete_key(k);
        oracle.erase(k);
      } else if (what < 62) {
        Key hi = std::min<Key>(universe, k + 1 + rng() % 30);
        if (k < hi) {
          store->range_delete(k, hi);
          oracle.erase(oracle.lower_bound(k), oracle.lower_bound(hi));
        }
      } else {
        auto got = store->get(k);
        auto it = oracle.find(k);
        if (it == oracle.end()) {
          CHECK(!got.found());
        } else {
          REQUIRE(got.found());
          CHECK(got.value == padded(it->second, cfg));
        }
      }
      if (op % 500 == 499) {
        Key lo = rng() % universe;
        Key hi = std::min<Key>(universe, lo + 1 + rng() % 100);
        if (lo < hi) {
          auto got = store->scan(lo, hi);
          std::vector<std::pair<Key, std::string>> expect;
          for (auto it = oracle.lower_bound(lo);
               it != oracle.end() && it->first < hi; ++it)
            expect.emplace_back(it->first, it->second);
          REQUIRE(got.size() == expect.size());
          for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].key == expect[i].first);
            CHECK(got[i].value == padded(expect[i].second, cfg));
          }
        }
      }
    }
  }
}

TEST_CASE("lrr stores range tombstones without expanding them") {
  TempDir dir("lrr");
  StoreConfig cfg = tiny_cfg(Strategy::kLrr, 4);
  auto stats = std::make_shared<IoStats>();
  auto store = LsmStore::create(cfg, dir.str(), stats);
  // enough data that level 1 is not the bottommost level
  for (Key k = 0; k < 40; ++k) store->put(k, "x");
  REQUIRE(store->level_count() >= 2);
  store->range_delete(0, 1000);
  CHECK(store->memtable_size() == 0);  // no per-key tombstones
  CHECK(!store->get(2).found());
  CHECK(store->get(2).outcome == LookupOutcome::kDeletedByRange);
  CHECK(store->scan(0, 1000).empty());

  // flush pushes the tombstone into a non-bottom run's tombstone block
  store->put(5000, "y");
  store->flush();
  bool tomb_on_disk = false;
  for (std::size_t i = 0; i < store->level_count(); ++i)
    if (store->level_run(i).has_value() &&
        store->level_run(i)->tombstone_count() > 0)
      tomb_on_disk = true;
  CHECK(tomb_on_disk);
  CHECK(!store->get(2).found());
  CHECK(store->counters().tombstone_records_examined > 0);
}

TEST_CASE("decomp honours the expansion cap") {
  TempDir dir("cap");
  StoreConfig cfg = tiny_cfg(Strategy::kDecomp);
  cfg.decomp_max_expansion = 16;
  auto stats = std::make_shared<IoStats>();
  auto store = LsmStore::create(cfg, dir.str(), stats);
  CHECK_NOTHROW(store->range_delete(0, 16));
  CHECK_THROWS_AS(store->range_delete(0, 17), StoreError);

  StoreConfig cfg2 = tiny_cfg(Strategy::kLookupDelete);
  cfg2.decomp_max_expansion = 16;
  TempDir dir2("cap2");
  auto store2 = LsmStore::create(cfg2, dir2.str(), stats);
  CHECK_THROWS_AS(store2->range_delete(0, 17), StoreError);
}

TEST_CASE("levels cascade and respect capacities") {
  TempDir dir("cascade");
  StoreConfig cfg = tiny_cfg(Strategy::kDecomp, 4, 2);
  auto stats = std::make_shared<IoStats>();
  auto store = LsmStore::create(cfg, dir.str(), stats);
  for (Key k = 0; k < 200; ++k) store->put(k, "v");
  CHECK(store->level_count() >= 2);
  for (std::size_t i = 0; i + 1 < store->level_count(); ++i) {
    if (!store->level_run(i).has_value()) continue;
    CHECK(store->level_run(i)->entry_count() <= store->level_capacity(i));
  }
  CHECK(store->total_entries() == 200);
  for (Key k = 0; k < 200; ++k) CHECK(store->get(k).found());
}

TEST_CASE("reopen restores data and sequence counter") {
  TempDir dir("reopen");
  StoreConfig cfg = tiny_cfg(Strategy::kLrr, 4);
  auto stats = std::make_shared<IoStats>();
  SequenceNumber last;
  {
    auto store = LsmStore::create(cfg, dir.str(), stats);
    for (Key k = 0; k < 30; ++k) store->put(k, "val" + std::to_string(k));
    store->range_delete(10, 20);
    store->flush();
    store->save_manifest();
    last = store->last_sequence();
  }
  auto store = LsmStore::open(dir.str(), stats);
  CHECK(store->last_sequence() == last);
  CHECK(store->config().strategy == Strategy::kLrr);
  for (Key k = 0; k < 30; ++k) {
    auto got = store->get(k);
    if (k >= 10 && k < 20) {
      CHECK(!got.found());
    } else {
      REQUIRE(got.found());
      CHECK(got.value == padded("val" + std::to_string(k), cfg));
    }
  }
  // new writes continue with fresh sequence numbers
  store->put(10, "back");
  CHECK(store->get(10).found());
}

TEST_CASE("tombstones expire at the bottommost level") {
  TempDir dir("expire");
  StoreConfig cfg = tiny_cfg(Strategy::kDecomp, 4, 2);
  auto stats = std::make_shared<IoStats>();
  auto store = LsmStore::create(cfg, dir.str(), stats);
  for (Key k = 0; k < 40; ++k) store->put(k, "v");
  for (Key k = 0; k < 40; ++k) store->delete_key(k);
  store->force_flush_and_compact_to_bottom();
  CHECK(store->total_entries() == 0);
  for (Key k = 0; k < 40; ++k) CHECK(!store->get(k).found());
}
