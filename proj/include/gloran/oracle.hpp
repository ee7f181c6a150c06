#ifndef GLORAN_ORACLE_HPP
#define GLORAN_ORACLE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gloran/trace.hpp"
#include "gloran/types.hpp"

namespace gloran {

// Brute-force replay of the operation history. Every later mutation carries a
// larger sequence number, so a range delete simply removes all currently live
// keys inside its range.
class ShadowOracle {
 public:
  void apply(const Operation& op) {
    switch (op.kind) {
      case OpKind::kUpdate:
        live_[op.key] = op.value;
        break;
      case OpKind::kDelete:
        live_.erase(op.key);
        break;
      case OpKind::kRangeDelete:
        live_.erase(live_.lower_bound(op.key), live_.lower_bound(op.key2));
        break;
      case OpKind::kGet:
      case OpKind::kScan:
        break;
    }
  }

  std::optional<std::string> get(Key key) const {
    auto it = live_.find(key);
    if (it == live_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::pair<Key, std::string>> scan(Key lo, Key hi) const {
    std::vector<std::pair<Key, std::string>> out;
    for (auto it = live_.lower_bound(lo); it != live_.end() && it->first < hi;
         ++it) {
      out.emplace_back(it->first, it->second);
    }
    return out;
  }

  std::size_t live_count() const { return live_.size(); }

 private:
  std::map<Key, std::string> live_;
};

}  // namespace gloran

#endif
