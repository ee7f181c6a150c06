#ifndef GLORAN_EVE_HPP
#define GLORAN_EVE_HPP

#include <cstdint>
#include <deque>
#include <vector>

#include "gloran/bloom.hpp"
#include "gloran/types.hpp"

namespace gloran {

enum class Validity { kMaybeDeleted, kDefinitelyValid };

// Range-aware estimator: a Bloom filter over virtual bit-array segment
// positions. Segment width is U / V with V a power of two, so a deleted range
// maps to a handful of positions instead of per-key insertions.
class Rae {
 public:
  // segment_width 0 picks the default derived from the key universe.
  Rae(std::uint64_t capacity, double bits_per_record,
      std::uint64_t key_universe, std::uint64_t epoch_id,
      std::uint64_t segment_width = 0);

  void insert(Key lo, Key hi, SequenceNumber seq);
  Validity query(Key key) const;

  bool full() const { return count_ >= capacity_; }
  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t count() const { return count_; }
  SequenceNumber seq_min() const { return seq_min_; }
  SequenceNumber seq_max() const { return seq_max_; }
  std::uint64_t segment_width() const { return segment_width_; }
  std::uint64_t positions_per_range(Key lo, Key hi) const {
    return (hi - 1) / segment_width_ - lo / segment_width_ + 1;
  }
  std::uint64_t memory_bits() const { return filter_.bits(); }

 private:
  std::uint64_t position_hash(std::uint64_t pos) const {
    return mix64(pos * 0x100000001b3ull + epoch_id_);
  }

  std::uint64_t capacity_;
  std::uint64_t segment_width_;  // power of two
  std::uint64_t epoch_id_;
  std::uint64_t count_ = 0;
  SequenceNumber seq_min_ = 0;
  SequenceNumber seq_max_ = 0;
  BloomFilter filter_;
};

// Chain of RAEs in ascending sequence epochs; the newest is active and each
// new epoch doubles the capacity of the previous one.
class Eve {
 public:
  Eve(const StoreConfig& cfg);

  void insert(Key lo, Key hi, SequenceNumber seq);
  Validity query(Key key, SequenceNumber entry_seq) const;
  void drop_outdated(SequenceNumber watermark);

  std::size_t chain_length() const { return chain_.size(); }
  const Rae& rae(std::size_t i) const { return chain_[i]; }
  std::uint64_t memory_bits() const;

 private:
  std::uint64_t first_capacity_;
  double bits_per_record_;
  std::uint64_t key_universe_;
  std::uint64_t next_epoch_id_ = 0;
  std::deque<Rae> chain_;  // oldest -> newest; back() is active
};

}  // namespace gloran

#endif
