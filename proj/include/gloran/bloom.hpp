#ifndef GLORAN_BLOOM_HPP
#define GLORAN_BLOOM_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace gloran {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Standard Bloom filter with double hashing derived from one 64-bit hash.
class BloomFilter {
 public:
  BloomFilter() = default;
  // Bit count rounds up to whole bytes so a filter rebuilt from its
  // serialized bytes hashes identically.
  BloomFilter(std::uint64_t bits, std::uint32_t hashes)
      : bits_((bits < 8 ? 8 : bits + 7) / 8 * 8),
        hashes_(hashes == 0 ? 1 : hashes),
        data_(bits_ / 8, 0) {}

  static std::uint32_t hash_count(double bits_per_key) {
    int h = static_cast<int>(std::lround(bits_per_key * 0.6931471805599453));
    if (h < 1) h = 1;
    if (h > 16) h = 16;
    return static_cast<std::uint32_t>(h);
  }

  void insert(std::uint64_t key) {
    std::uint64_t h1 = mix64(key);
    std::uint64_t h2 = mix64(h1 ^ 0xa5a5a5a5a5a5a5a5ull) | 1;
    for (std::uint32_t i = 0; i < hashes_; ++i) {
      std::uint64_t bit = (h1 + i * h2) % bits_;
      data_[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    }
  }

  bool may_contain(std::uint64_t key) const {
    if (data_.empty()) return false;
    std::uint64_t h1 = mix64(key);
    std::uint64_t h2 = mix64(h1 ^ 0xa5a5a5a5a5a5a5a5ull) | 1;
    for (std::uint32_t i = 0; i < hashes_; ++i) {
      std::uint64_t bit = (h1 + i * h2) % bits_;
      if (!(data_[bit >> 3] & (1u << (bit & 7)))) return false;
    }
    return true;
  }

  std::uint64_t bits() const { return bits_; }
  std::uint32_t hashes() const { return hashes_; }
  const std::vector<std::uint8_t>& bytes() const { return data_; }

  static BloomFilter from_bytes(std::vector<std::uint8_t> bytes,
                                std::uint32_t hashes) {
    BloomFilter f;
    f.bits_ = bytes.size() * 8;
    if (f.bits_ == 0) f.bits_ = 8;
    f.hashes_ = hashes == 0 ? 1 : hashes;
    f.data_ = std::move(bytes);
    if (f.data_.empty()) f.data_.resize(1, 0);
    return f;
  }

 private:
  std::uint64_t bits_ = 0;
  std::uint32_t hashes_ = 1;
  std::vector<std::uint8_t> data_;
};

}  // namespace gloran

#endif
