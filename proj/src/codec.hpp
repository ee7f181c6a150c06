#ifndef GLORAN_SRC_CODEC_HPP
#define GLORAN_SRC_CODEC_HPP

#include <cstdint>
#include <cstring>
#include <vector>

namespace gloran::codec {

inline void put_u64le(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint64_t get_u64le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

// k-byte big-endian key field; the value occupies the low 8 bytes.
inline void put_key_be(std::uint8_t* p, std::uint64_t k_width,
                       std::uint64_t v) {
  std::memset(p, 0, k_width);
  for (std::uint64_t i = 0; i < 8 && i < k_width; ++i)
    p[k_width - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint64_t get_key_be(const std::uint8_t* p, std::uint64_t k_width) {
  std::uint64_t v = 0;
  std::uint64_t start = k_width > 8 ? k_width - 8 : 0;
  for (std::uint64_t i = start; i < k_width; ++i) v = (v << 8) | p[i];
  return v;
}

}  // namespace gloran::codec

#endif
