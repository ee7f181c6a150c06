#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "gloran/bloom.hpp"
#include "gloran/io.hpp"
#include "gloran/trace.hpp"
#include "gloran/types.hpp"
#include "test_support.hpp"

using namespace gloran;
using gloran_test::TempDir;

TEST_CASE("config defaults validate and round-trip") {
  StoreConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.value_size() == 47);

  StoreConfig parsed = parse_config_text(config_to_text(cfg));
  CHECK(parsed.memtable_capacity == cfg.memtable_capacity);
  CHECK(parsed.size_ratio == cfg.size_ratio);
  CHECK(parsed.block_size == cfg.block_size);
  CHECK(parsed.strategy == cfg.strategy);
  CHECK(parsed.key_universe == cfg.key_universe);
  CHECK(parsed.eve_bits_per_record == cfg.eve_bits_per_record);
}

TEST_CASE("config parser rejects bad input with line numbers") {
  CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), StoreError);
  CHECK_THROWS_AS(parse_config_text("size_ratio = frog\n"), StoreError);
  CHECK_THROWS_AS(parse_config_text("no equals sign\n"), StoreError);
  try {
    parse_config_text("# comment\nsize_ratio = 10\nbogus = 1\n");
    FAIL("expected throw");
  } catch (const StoreError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  // comments and blank lines are fine
  CHECK_NOTHROW(parse_config_text("# a comment\n\nsize_ratio = 4\n"));
}

TEST_CASE("config validation rules") {
  StoreConfig cfg;
  cfg.size_ratio = 1;
  CHECK_THROWS_AS(cfg.validate(), StoreError);
  cfg = StoreConfig{};
  cfg.key_universe = 1000;  // not a power of two
  CHECK_THROWS_AS(cfg.validate(), StoreError);
  cfg = StoreConfig{};
  cfg.entry_width = 16;  // < k + 9
  CHECK_THROWS_AS(cfg.validate(), StoreError);
  cfg = StoreConfig{};
  cfg.drtree_fanout = 200;  // node no longer fits a 4K block at k=8
  CHECK_THROWS_AS(cfg.validate(), StoreError);
}

TEST_CASE("strategy name round-trip") {
  for (Strategy s : {Strategy::kDecomp, Strategy::kScanDelete,
                     Strategy::kLookupDelete, Strategy::kLrr,
                     Strategy::kGloran}) {
    CHECK(strategy_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(strategy_from_string("nope"), StoreError);
}

TEST_CASE("block device charges ceil(bytes/B) to the right counter") {
  TempDir dir("blockdev");
  auto stats = std::make_shared<IoStats>();
  BlockDevice dev(dir.file("blk"), 4096, stats, true);

  std::vector<std::uint8_t> one(4096, 7);
  dev.write(0, one, IoCounter::kDataWrite);
  CHECK(stats->data_block_writes == 1);

  std::vector<std::uint8_t> big(4096 * 2 + 100, 9);
  dev.write(4096, big, IoCounter::kIndexWrite);
  CHECK(stats->index_node_writes == 3);

  std::vector<std::uint8_t> out(4096);
  dev.read(0, out, IoCounter::kDataRead);
  CHECK(stats->data_block_reads == 1);
  CHECK(out[0] == 7);

  dev.read(4096, out, IoCounter::kTombstoneRead);
  CHECK(stats->tombstone_block_reads == 1);
  CHECK(out[0] == 9);

  dev.read(0, out, IoCounter::kIndexRead);
  CHECK(stats->index_node_reads == 1);

  CHECK_THROWS(dev.read(100, out, IoCounter::kDataRead));
  CHECK_THROWS(dev.write(1, one, IoCounter::kDataWrite));
}

TEST_CASE("block device reads past EOF zero-fill") {
  TempDir dir("blockdev2");
  auto stats = std::make_shared<IoStats>();
  BlockDevice dev(dir.file("blk"), 512, stats, true);
  std::vector<std::uint8_t> data(512, 0xAB);
  dev.write(0, data, IoCounter::kDataWrite);
  CHECK(dev.size_bytes() == 512);
  std::vector<std::uint8_t> out(1024, 0xFF);
  dev.read(0, out, IoCounter::kDataRead);
  CHECK(out[0] == 0xAB);
  CHECK(out[511] == 0xAB);
  CHECK(out[512] == 0);
  CHECK(out[1023] == 0);
}

TEST_CASE("bloom filter basics") {
  CHECK(BloomFilter::hash_count(10.0) == 7);
  CHECK(BloomFilter::hash_count(0.1) == 1);
  CHECK(BloomFilter::hash_count(100.0) == 16);

  const int n = 5000;
  BloomFilter f(n * 10, BloomFilter::hash_count(10.0));
  for (int i = 0; i < n; ++i) f.insert(static_cast<std::uint64_t>(i) * 31 + 1);
  for (int i = 0; i < n; ++i)
    CHECK(f.may_contain(static_cast<std::uint64_t>(i) * 31 + 1));

  // measured FPR close to the classical 0.6185^bpe anchor
  int fp = 0;
  const int probes = 100000;
  for (int i = 0; i < probes; ++i) {
    if (f.may_contain(0x8000000000000000ull + i)) ++fp;
  }
  double fpr = static_cast<double>(fp) / probes;
  double expect = std::pow(0.6185, 10.0);
  CHECK(fpr > expect * 0.5);
  CHECK(fpr < expect * 2.0);

  BloomFilter g = BloomFilter::from_bytes(f.bytes(), f.hashes());
  for (int i = 0; i < n; ++i)
    CHECK(g.may_contain(static_cast<std::uint64_t>(i) * 31 + 1));
}

TEST_CASE("trace format round-trip") {
  std::vector<Operation> ops;
  Operation u;
  u.kind = OpKind::kUpdate;
  u.key = 42;
  u.value = std::string("\x00\x01xyz\xff", 6);
  ops.push_back(u);
  Operation g;
  g.kind = OpKind::kGet;
  g.key = 7;
  ops.push_back(g);
  Operation d;
  d.kind = OpKind::kDelete;
  d.key = 9;
  ops.push_back(d);
  Operation r;
  r.kind = OpKind::kRangeDelete;
  r.key = 10;
  r.key2 = 20;
  ops.push_back(r);
  Operation s;
  s.kind = OpKind::kScan;
  s.key = 0;
  s.key2 = 100;
  ops.push_back(s);

  for (std::size_t i = 0; i < ops.size(); ++i) {
    Operation back = parse_operation(format_operation(ops[i]), i + 1);
    CHECK(back.kind == ops[i].kind);
    CHECK(back.key == ops[i].key);
    CHECK(back.key2 == ops[i].key2);
    CHECK(back.value == ops[i].value);
  }

  TempDir dir("trace");
  write_trace_file(dir.file("t.trace"), ops);
  auto loaded = load_trace_file(dir.file("t.trace"));
  REQUIRE(loaded.size() == ops.size());
  CHECK(loaded[0].value == ops[0].value);
  CHECK(loaded[3].key2 == 20);
}

TEST_CASE("trace parser rejects malformed lines") {
  CHECK_THROWS_AS(parse_operation("X 1", 1), StoreError);
  CHECK_THROWS_AS(parse_operation("G", 1), StoreError);
  CHECK_THROWS_AS(parse_operation("R 5 5", 1), StoreError);   // empty range
  CHECK_THROWS_AS(parse_operation("S 9 3", 1), StoreError);   // inverted
  CHECK_THROWS_AS(parse_operation("G 1 trailing", 1), StoreError);
  CHECK_THROWS_AS(parse_operation("U 1 xyz", 1), StoreError);  // bad hex
}

TEST_CASE("hex codec") {
  CHECK(hex_encode("") == "");
  std::string all;
  for (int i = 0; i < 256; ++i) all.push_back(static_cast<char>(i));
  CHECK(hex_decode(hex_encode(all)) == all);
}

TEST_CASE("sequence counter") {
  SequenceCounter c;
  CHECK(c.next() == 1);
  CHECK(c.next() == 2);
  CHECK(c.last() == 2);
  c.restore(100);
  CHECK(c.next() == 101);
}
