#include "gloran/effective_area.hpp"

#include <algorithm>
#include <cassert>
#include <queue>

namespace gloran {

std::vector<EffectiveArea> disjointize_pair(const EffectiveArea& older,
                                            const EffectiveArea& newer) {
  assert(newer.seq_hi > older.seq_hi);
  if (!older.key_overlaps(newer)) {
    if (older.key_lo <= newer.key_lo) return {older, newer};
    return {newer, older};
  }
  // The newer area dominates the overlapped key range; the older one keeps
  // only the key span outside it. Entries below the newer area's seq_lo were
  // already gone when it was issued, so shrinking coverage there is safe.
  std::vector<EffectiveArea> out;
  if (older.key_lo < newer.key_lo) {
    out.push_back({older.key_lo, newer.key_lo, older.seq_lo, older.seq_hi});
  }
  out.push_back(newer);
  if (older.key_hi > newer.key_hi) {
    out.push_back({newer.key_hi, older.key_hi, older.seq_lo, older.seq_hi});
  }
  return out;
}

std::vector<EffectiveArea> sweep_disjointize(std::vector<EffectiveArea> areas) {
  if (areas.size() <= 1) return areas;
  std::sort(areas.begin(), areas.end(),
            [](const EffectiveArea& a, const EffectiveArea& b) {
              return a.key_lo < b.key_lo;
            });

  // Boundary keys of every area, scanned in ascending order. End events are
  // settled before start events at equal keys, so no zero-width fragment can
  // form.
  std::vector<Key> bounds;
  bounds.reserve(areas.size() * 2);
  for (const auto& a : areas) {
    assert(a.valid());
    bounds.push_back(a.key_lo);
    bounds.push_back(a.key_hi);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  auto by_seq = [](const EffectiveArea& a, const EffectiveArea& b) {
    return a.seq_hi < b.seq_hi;
  };
  std::priority_queue<EffectiveArea, std::vector<EffectiveArea>,
                      decltype(by_seq)>
      curr(by_seq);

  std::vector<EffectiveArea> out;
  std::size_t next_area = 0;
  for (std::size_t bi = 0; bi + 1 <= bounds.size(); ++bi) {
    Key b = bounds[bi];
    // Retire areas whose end key has been reached.
    while (!curr.empty() && curr.top().key_hi <= b) curr.pop();
    while (next_area < areas.size() && areas[next_area].key_lo == b) {
      curr.push(areas[next_area]);
      ++next_area;
    }
    if (curr.empty() || bi + 1 == bounds.size()) continue;
    Key b_next = bounds[bi + 1];
    const EffectiveArea& dom = curr.top();
    if (!out.empty() && out.back().key_hi == b &&
        out.back().seq_hi == dom.seq_hi && out.back().seq_lo == dom.seq_lo) {
      out.back().key_hi = b_next;  // same dominant continues
    } else {
      out.push_back({b, b_next, dom.seq_lo, dom.seq_hi});
    }
  }
  return out;
}

}  // namespace gloran
