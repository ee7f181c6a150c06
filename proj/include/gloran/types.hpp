#ifndef GLORAN_TYPES_HPP
#define GLORAN_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gloran {

using Key = std::uint64_t;
using SequenceNumber = std::uint64_t;

// Sequence 0 is reserved as the beginning-of-time lower bound and is never
// assigned to an operation.
inline constexpr SequenceNumber kReservedSeq = 0;

enum class EntryKind : std::uint8_t { kValue = 0, kTombstone = 1 };

struct Entry {
  Key key = 0;
  SequenceNumber seq = kReservedSeq;
  EntryKind kind = EntryKind::kValue;
  std::string value;  // empty for tombstones
};

enum class Strategy {
  kDecomp,
  kScanDelete,
  kLookupDelete,
  kLrr,
  kGloran,
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct StoreConfig {
  std::uint64_t memtable_capacity = 4096;   // F, entries
  std::uint64_t size_ratio = 10;            // T
  std::uint64_t block_size = 4096;          // B, bytes
  std::uint64_t key_width = 8;              // k, on-disk key bytes
  std::uint64_t entry_width = 64;           // e, on-disk entry bytes
  double bloom_bits_per_entry = 10.0;
  std::uint64_t key_universe = 1ull << 26;  // U, power of two
  Strategy strategy = Strategy::kGloran;
  std::uint64_t index_buffer_capacity = 256;  // F', effective areas
  std::uint64_t index_size_ratio = 10;        // T'
  std::uint64_t drtree_fanout = 10;           // D
  std::uint64_t eve_first_capacity = 1ull << 13;  // records
  double eve_bits_per_record = 10.0;
  std::uint64_t decomp_max_expansion = 1ull << 16;

  // Value bytes carried by a VALUE entry: entry_width minus key, seq and kind.
  std::uint64_t value_size() const { return entry_width - key_width - 9; }

  void validate() const;
};

class StoreError : public std::runtime_error {
 public:
  explicit StoreError(const std::string& what) : std::runtime_error(what) {}
};

// Flat `key = value` config text, one setting per line. Unknown keys are
// rejected. '#' starts a comment line.
StoreConfig parse_config_text(const std::string& text);
StoreConfig load_config_file(const std::string& path);
std::string config_to_text(const StoreConfig& cfg);

class SequenceCounter {
 public:
  explicit SequenceCounter(SequenceNumber last = kReservedSeq) : last_(last) {}
  SequenceNumber next() { return ++last_; }
  SequenceNumber last() const { return last_; }
  void restore(SequenceNumber last) { last_ = last; }

 private:
  SequenceNumber last_;
};

}  // namespace gloran

#endif
