#include "gloran/eve.hpp"

#include <algorithm>
#include <cassert>

namespace gloran {

namespace {

// Segment width U/V with V = U / 2^6 capped at 2^20 positions, so a short
// deleted range touches only a couple of segments.
std::uint64_t pick_segment_width(std::uint64_t key_universe) {
  std::uint64_t positions = key_universe >> 6;
  if (positions == 0) positions = 1;
  if (positions > (1ull << 20)) positions = 1ull << 20;
  std::uint64_t w = key_universe / positions;
  if (w == 0) w = 1;
  return w;
}

constexpr double kSegmentsPerRange = 2.0;  // sizing assumption

}  // namespace

Rae::Rae(std::uint64_t capacity, double bits_per_record,
         std::uint64_t key_universe, std::uint64_t epoch_id,
         std::uint64_t segment_width)
    : capacity_(capacity == 0 ? 1 : capacity),
      segment_width_(segment_width == 0 ? pick_segment_width(key_universe)
                                        : segment_width),
      epoch_id_(epoch_id) {
  auto bits = static_cast<std::uint64_t>(
      static_cast<double>(capacity_) * bits_per_record * kSegmentsPerRange);
  double bits_per_pos = bits_per_record;  // m / expected positions
  filter_ = BloomFilter(bits, BloomFilter::hash_count(bits_per_pos));
}

void Rae::insert(Key lo, Key hi, SequenceNumber seq) {
  assert(lo < hi);
  std::uint64_t first = lo / segment_width_;
  std::uint64_t last = (hi - 1) / segment_width_;
  for (std::uint64_t p = first; p <= last; ++p)
    filter_.insert(position_hash(p));
  if (count_ == 0) {
    seq_min_ = seq_max_ = seq;
  } else {
    seq_min_ = std::min(seq_min_, seq);
    seq_max_ = std::max(seq_max_, seq);
  }
  ++count_;
}

Validity Rae::query(Key key) const {
  if (count_ == 0) return Validity::kDefinitelyValid;
  std::uint64_t pos = key / segment_width_;
  return filter_.may_contain(position_hash(pos)) ? Validity::kMaybeDeleted
                                                 : Validity::kDefinitelyValid;
}

Eve::Eve(const StoreConfig& cfg)
    : first_capacity_(cfg.eve_first_capacity),
      bits_per_record_(cfg.eve_bits_per_record),
      key_universe_(cfg.key_universe) {
  chain_.emplace_back(first_capacity_, bits_per_record_, key_universe_,
                      next_epoch_id_++);
}

void Eve::insert(Key lo, Key hi, SequenceNumber seq) {
  if (chain_.back().full()) {
    std::uint64_t doubled = chain_.back().capacity() * 2;
    chain_.emplace_back(doubled, bits_per_record_, key_universe_,
                        next_epoch_id_++);
  }
  chain_.back().insert(lo, hi, seq);
}

Validity Eve::query(Key key, SequenceNumber entry_seq) const {
  // Newest to oldest; epochs at or below the entry's sequence number cannot
  // invalidate it.
  for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
    if (it->count() == 0) continue;
    if (it->seq_max() <= entry_seq) break;
    if (it->query(key) == Validity::kMaybeDeleted)
      return Validity::kMaybeDeleted;
  }
  return Validity::kDefinitelyValid;
}

void Eve::drop_outdated(SequenceNumber watermark) {
  while (chain_.size() > 1 && chain_.front().count() > 0 &&
         chain_.front().seq_max() <= watermark) {
    chain_.pop_front();
  }
}

std::uint64_t Eve::memory_bits() const {
  std::uint64_t bits = 0;
  for (const auto& r : chain_) bits += r.memory_bits();
  return bits;
}

}  // namespace gloran
