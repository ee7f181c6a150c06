#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "doctest.h"
#include "gloran/dr_tree.hpp"
#include "gloran/effective_area.hpp"
#include "test_support.hpp"

using namespace gloran;
using gloran_test::TempDir;

namespace {

StoreConfig small_cfg() {
  StoreConfig cfg;
  cfg.drtree_fanout = 10;
  return cfg;
}

// n disjoint areas with random gaps and seq windows, sorted by key_lo.
std::vector<EffectiveArea> make_disjoint(std::mt19937_64& rng, std::size_t n) {
  std::vector<EffectiveArea> areas;
  Key cursor = rng() % 5;
  for (std::size_t i = 0; i < n; ++i) {
    EffectiveArea a;
    a.key_lo = cursor;
    a.key_hi = cursor + 1 + rng() % 20;
    a.seq_lo = rng() % 50;
    a.seq_hi = a.seq_lo + 1 + rng() % 100;
    cursor = a.key_hi + rng() % 10;
    areas.push_back(a);
  }
  return areas;
}

std::optional<EffectiveArea> linear_lookup(
    const std::vector<EffectiveArea>& areas, Key k, SequenceNumber s) {
  for (const auto& a : areas)
    if (a.covers(k, s)) return a;
  return std::nullopt;
}

}  // namespace

TEST_CASE("stored area invalidates older entry only") {
  TempDir dir("drt");
  StoreConfig cfg = small_cfg();
  auto stats = std::make_shared<IoStats>();
  std::vector<EffectiveArea> areas{{7, 14, 0, 8}};
  DRTree t = DRTree::build(areas, cfg, dir.file("a.drt"), stats);

  auto hit = t.query_point(8, 5);
  REQUIRE(hit.covered.has_value());
  CHECK(*hit.covered == areas[0]);
  CHECK(hit.node_accesses <= t.height());

  auto miss = t.query_point(8, 9);
  CHECK(!miss.covered.has_value());
  auto outside = t.query_point(14, 5);
  CHECK(!outside.covered.has_value());
}

TEST_CASE("build rejects unsorted or overlapping input") {
  TempDir dir("drt_bad");
  StoreConfig cfg = small_cfg();
  auto stats = std::make_shared<IoStats>();
  std::vector<EffectiveArea> overlapping{{0, 10, 0, 5}, {5, 15, 0, 9}};
  CHECK_THROWS_AS(DRTree::build(overlapping, cfg, dir.file("x.drt"), stats),
                  StoreError);
  std::vector<EffectiveArea> unsorted{{20, 30, 0, 5}, {0, 10, 0, 9}};
  CHECK_THROWS_AS(DRTree::build(unsorted, cfg, dir.file("y.drt"), stats),
                  StoreError);
}

TEST_CASE("height and node count follow the packing rule") {
  TempDir dir("drt_shape");
  StoreConfig cfg = small_cfg();
  const double D = static_cast<double>(cfg.drtree_fanout);
  auto stats = std::make_shared<IoStats>();
  std::mt19937_64 rng(5);
  for (std::size_t n : {1ul, 2ul, 9ul, 10ul, 11ul, 99ul, 100ul, 101ul, 257ul,
                        1000ul, 1001ul}) {
    auto areas = make_disjoint(rng, n);
    DRTree t = DRTree::build(areas, cfg, dir.file("s.drt"), stats);
    CHECK(t.leaf_count() == n);
    std::uint64_t expect_height = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(
               std::ceil(std::log(static_cast<double>(n)) / std::log(D) -
                         1e-9)));
    CHECK(t.height() == expect_height);
    // space bound audited for every tree
    CHECK(static_cast<double>(t.node_count()) <=
          (D / (D - 1.0)) * static_cast<double>(n) + 1e-9);
    CHECK(t.node_count() >= t.leaf_count());
  }
}

TEST_CASE("query_point equals linear scan and touches one node per level") {
  TempDir dir("drt_query");
  StoreConfig cfg = small_cfg();
  auto stats = std::make_shared<IoStats>();
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + rng() % 400;
    auto areas = make_disjoint(rng, n);
    DRTree t = DRTree::build(areas, cfg, dir.file("q.drt"), stats);
    Key max_key = areas.back().key_hi + 5;
    for (int probe = 0; probe < 200; ++probe) {
      Key k = rng() % max_key;
      SequenceNumber s = rng() % 160;
      std::uint64_t before = stats->index_node_reads;
      auto res = t.query_point(k, s);
      std::uint64_t charged = stats->index_node_reads - before;
      CHECK(res.node_accesses <= t.height());
      CHECK(charged == res.node_accesses);
      auto expect = linear_lookup(areas, k, s);
      CHECK(res.covered.has_value() == expect.has_value());
      if (res.covered && expect) CHECK(*res.covered == *expect);
    }
  }
}

TEST_CASE("open round-trips the file") {
  TempDir dir("drt_open");
  StoreConfig cfg = small_cfg();
  auto stats = std::make_shared<IoStats>();
  std::mt19937_64 rng(23);
  auto areas = make_disjoint(rng, 137);
  {
    DRTree t = DRTree::build(areas, cfg, dir.file("r.drt"), stats);
    CHECK(t.min_seq_hi() ==
          std::min_element(areas.begin(), areas.end(),
                           [](const EffectiveArea& a, const EffectiveArea& b) {
                             return a.seq_hi < b.seq_hi;
                           })
              ->seq_hi);
  }
  DRTree t = DRTree::open(cfg, dir.file("r.drt"), stats);
  CHECK(t.leaf_count() == 137);
  CHECK(t.all_leaves() == areas);
  for (const auto& a : areas) {
    auto res = t.query_point(a.key_lo, a.seq_hi - 1);
    REQUIRE(res.covered.has_value());
    CHECK(*res.covered == a);
  }
}

TEST_CASE("iterate returns the intersecting run of leaves") {
  TempDir dir("drt_iter");
  StoreConfig cfg = small_cfg();
  auto stats = std::make_shared<IoStats>();
  std::mt19937_64 rng(31);
  auto areas = make_disjoint(rng, 300);
  DRTree t = DRTree::build(areas, cfg, dir.file("i.drt"), stats);
  Key max_key = areas.back().key_hi + 5;
  for (int trial = 0; trial < 100; ++trial) {
    Key lo = rng() % max_key;
    Key hi = lo + 1 + rng() % (max_key / 2);
    auto got = t.iterate(lo, hi);
    std::vector<EffectiveArea> expect;
    for (const auto& a : areas)
      if (a.key_lo < hi && lo < a.key_hi) expect.push_back(a);
    CHECK(got == expect);
  }
  CHECK(t.iterate(max_key + 10, max_key + 20).empty());
}
