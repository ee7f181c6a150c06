#ifndef GLORAN_EFFECTIVE_AREA_HPP
#define GLORAN_EFFECTIVE_AREA_HPP

#include <vector>

#include "gloran/types.hpp"

namespace gloran {

// Rectangle in (key x sequence) working space. Half-open in both dimensions;
// seq_hi is the issuing range delete's own sequence number.
struct EffectiveArea {
  Key key_lo = 0;
  Key key_hi = 0;
  SequenceNumber seq_lo = 0;
  SequenceNumber seq_hi = 0;

  bool covers(Key key, SequenceNumber seq) const {
    return key_lo <= key && key < key_hi && seq_lo <= seq && seq < seq_hi;
  }
  bool key_overlaps(const EffectiveArea& o) const {
    return key_lo < o.key_hi && o.key_lo < key_hi;
  }
  bool valid() const { return key_lo < key_hi && seq_lo < seq_hi; }

  friend bool operator==(const EffectiveArea&, const EffectiveArea&) = default;
};

// The record as issued: seq_lo is the GC watermark at issue time, seq_hi the
// operation's sequence number.
struct RangeRecord {
  EffectiveArea area;
};

// Resolves overlap between two areas where `newer.seq_hi > older.seq_hi`.
// Returns at most 3 pairwise key-disjoint areas sorted by key_lo. Inputs with
// disjoint key ranges are returned unchanged.
std::vector<EffectiveArea> disjointize_pair(const EffectiveArea& older,
                                            const EffectiveArea& newer);

// Plane sweep over start/end keys keeping the dominant (max seq_hi) active
// area per interval. Output is sorted by key_lo, pairwise key-disjoint, and at
// most twice the input size.
std::vector<EffectiveArea> sweep_disjointize(std::vector<EffectiveArea> areas);

}  // namespace gloran

#endif
