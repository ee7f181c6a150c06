#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gloran/eve.hpp"

using namespace gloran;

TEST_CASE("rae maps ranges to segment positions") {
  // U=1024, V=128 -> segment width 8: [70,80) touches positions {8,9},
  // so every key of segments 8 and 9 reads MaybeDeleted.
  Rae r(16, 16.0, 1024, 0, /*segment_width=*/8);
  CHECK(r.positions_per_range(70, 80) == 2);
  CHECK(r.positions_per_range(0, 8) == 1);
  CHECK(r.positions_per_range(0, 1024) == 128);

  r.insert(70, 80, 5);
  for (Key k = 64; k < 80; ++k) CHECK(r.query(k) == Validity::kMaybeDeleted);
  CHECK(r.seq_min() == 5);
  CHECK(r.seq_max() == 5);
  CHECK(r.count() == 1);

  // distant keys stay valid (generous bits keep collisions out of a filter
  // holding two positions)
  int fp = 0;
  for (Key k = 200; k < 1000; ++k)
    if (r.query(k) == Validity::kMaybeDeleted) ++fp;
  CHECK(fp < 40);
}

TEST_CASE("empty rae answers DefinitelyValid") {
  Rae r(4, 10.0, 1024, 1);
  CHECK(r.query(0) == Validity::kDefinitelyValid);
  CHECK(r.query(777) == Validity::kDefinitelyValid);
}

TEST_CASE("eve chains with doubling capacities") {
  StoreConfig cfg;
  cfg.eve_first_capacity = 2;
  cfg.key_universe = 1 << 20;
  Eve e(cfg);
  CHECK(e.chain_length() == 1);
  e.insert(0, 10, 1);
  e.insert(20, 30, 2);
  CHECK(e.chain_length() == 1);
  e.insert(40, 50, 3);
  CHECK(e.chain_length() == 2);
  CHECK(e.rae(0).capacity() == 2);
  CHECK(e.rae(1).capacity() == 4);

  // epoch seq ranges ascend without overlap
  e.insert(60, 70, 4);
  e.insert(80, 90, 5);
  e.insert(100, 110, 6);
  e.insert(120, 130, 7);
  CHECK(e.chain_length() == 3);
  for (std::size_t i = 1; i < e.chain_length(); ++i) {
    if (e.rae(i).count() == 0) continue;
    CHECK(e.rae(i - 1).seq_max() < e.rae(i).seq_min());
  }
}

TEST_CASE("eve query skips epochs older than the entry") {
  StoreConfig cfg;
  cfg.key_universe = 1 << 20;
  Eve e(cfg);
  e.insert(70, 80, 9);
  CHECK(e.query(75, 5) == Validity::kMaybeDeleted);
  CHECK(e.query(75, 9) == Validity::kDefinitelyValid);
  CHECK(e.query(75, 12) == Validity::kDefinitelyValid);
}

TEST_CASE("no false negatives over random histories") {
  StoreConfig cfg;
  cfg.eve_first_capacity = 8;  // force long chains
  cfg.key_universe = 1 << 16;
  Eve e(cfg);
  std::mt19937_64 rng(5);
  struct Rec {
    Key lo, hi;
    SequenceNumber seq;
  };
  std::vector<Rec> recs;
  SequenceNumber seq = 0;
  for (int i = 0; i < 500; ++i) {
    Key lo = rng() % ((1 << 16) - 200);
    Key hi = lo + 1 + rng() % 200;
    ++seq;
    e.insert(lo, hi, seq);
    recs.push_back({lo, hi, seq});
  }
  for (int probe = 0; probe < 100000; ++probe) {
    Key k = rng() % (1 << 16);
    SequenceNumber s = rng() % (seq + 2);
    bool truly_covered = false;
    for (const auto& r : recs)
      if (r.lo <= k && k < r.hi && s < r.seq) truly_covered = true;
    if (truly_covered) CHECK(e.query(k, s) == Validity::kMaybeDeleted);
  }
}

TEST_CASE("fpr is non-increasing in bits per record") {
  // Monte-Carlo over absent keys; noise bounded by 3 sigma per step.
  std::mt19937_64 rng(11);
  std::vector<double> fprs;
  const int probes = 100000;
  for (double bits : {6.0, 8.0, 10.0, 12.0, 14.0, 16.0}) {
    StoreConfig cfg;
    cfg.eve_first_capacity = 1 << 12;
    cfg.eve_bits_per_record = bits;
    cfg.key_universe = 1ull << 26;
    Eve e(cfg);
    std::mt19937_64 ins(99);  // same ranges for every sizing
    SequenceNumber seq = 0;
    for (int i = 0; i < 3000; ++i) {
      Key lo = ins() % ((1ull << 25));
      Key hi = lo + 1 + ins() % 256;
      e.insert(lo, hi, ++seq);
    }
    int fp = 0;
    for (int i = 0; i < probes; ++i) {
      // keys from the untouched upper half of the universe: never covered
      Key k = (1ull << 25) + (1ull << 24) + rng() % (1ull << 24);
      if (e.query(k, 0) == Validity::kMaybeDeleted) ++fp;
    }
    fprs.push_back(static_cast<double>(fp) / probes);
  }
  for (std::size_t i = 1; i < fprs.size(); ++i) {
    double p = fprs[i - 1];
    double sigma = std::sqrt(std::max(p * (1 - p), 1e-9) / probes);
    CHECK(fprs[i] <= fprs[i - 1] + 3 * sigma);
  }
  // and the sizing sweep actually moves the needle overall
  CHECK(fprs.back() <= fprs.front());
}

TEST_CASE("drop_outdated removes old epochs only") {
  StoreConfig cfg;
  cfg.eve_first_capacity = 2;
  cfg.key_universe = 1 << 20;
  Eve e(cfg);
  for (SequenceNumber s = 1; s <= 7; ++s) e.insert(100 * s, 100 * s + 10, s);
  std::size_t before = e.chain_length();
  REQUIRE(before >= 3);

  e.drop_outdated(0);
  CHECK(e.chain_length() == before);

  e.drop_outdated(2);  // first epoch holds seqs {1,2}
  CHECK(e.chain_length() == before - 1);
  // deletes newer than the threshold are still visible
  CHECK(e.query(305, 1) == Validity::kMaybeDeleted);
  CHECK(e.query(705, 1) == Validity::kMaybeDeleted);
}
