#ifndef GLORAN_IO_HPP
#define GLORAN_IO_HPP

#include <cstdint>
#include <cstdio>
#include <memory>
#include <span>
#include <string>

#include "gloran/types.hpp"

namespace gloran {

// Block transfer counters, in units of blocks.
struct IoStats {
  std::uint64_t data_block_reads = 0;
  std::uint64_t data_block_writes = 0;
  std::uint64_t tombstone_block_reads = 0;
  std::uint64_t index_node_reads = 0;
  std::uint64_t index_node_writes = 0;

  std::uint64_t total() const {
    return data_block_reads + data_block_writes + tombstone_block_reads +
           index_node_reads + index_node_writes;
  }
};

enum class IoCounter {
  kDataRead,
  kDataWrite,
  kTombstoneRead,
  kIndexRead,
  kIndexWrite,
};

// File-backed block device. Every read or write must start at a block-aligned
// offset and increments exactly one counter by ceil(bytes / block_size).
class BlockDevice {
 public:
  BlockDevice(std::string path, std::uint64_t block_size,
              std::shared_ptr<IoStats> stats, bool truncate);
  ~BlockDevice();

  BlockDevice(const BlockDevice&) = delete;
  BlockDevice& operator=(const BlockDevice&) = delete;

  void read(std::uint64_t offset, std::span<std::uint8_t> out, IoCounter c);
  void write(std::uint64_t offset, std::span<const std::uint8_t> data,
             IoCounter c);
  void sync();

  std::uint64_t size_bytes() const;
  std::uint64_t block_size() const { return block_size_; }
  const std::string& path() const { return path_; }

 private:
  void charge(IoCounter c, std::uint64_t blocks);

  std::string path_;
  std::uint64_t block_size_;
  std::shared_ptr<IoStats> stats_;
  std::FILE* file_ = nullptr;
};

}  // namespace gloran

#endif
