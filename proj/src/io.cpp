#include "gloran/io.hpp"

#include <cerrno>
#include <cstring>

namespace gloran {

BlockDevice::BlockDevice(std::string path, std::uint64_t block_size,
                         std::shared_ptr<IoStats> stats, bool truncate)
    : path_(std::move(path)), block_size_(block_size),
      stats_(std::move(stats)) {
  const char* mode = truncate ? "wb+" : "rb+";
  file_ = std::fopen(path_.c_str(), mode);
  if (!file_ && !truncate) file_ = std::fopen(path_.c_str(), "wb+");
  if (!file_)
    throw StoreError("cannot open " + path_ + ": " + std::strerror(errno));
}

BlockDevice::~BlockDevice() {
  if (file_) std::fclose(file_);
}

void BlockDevice::charge(IoCounter c, std::uint64_t blocks) {
  if (!stats_) return;
  switch (c) {
    case IoCounter::kDataRead: stats_->data_block_reads += blocks; break;
    case IoCounter::kDataWrite: stats_->data_block_writes += blocks; break;
    case IoCounter::kTombstoneRead:
      stats_->tombstone_block_reads += blocks;
      break;
    case IoCounter::kIndexRead: stats_->index_node_reads += blocks; break;
    case IoCounter::kIndexWrite: stats_->index_node_writes += blocks; break;
  }
}

void BlockDevice::read(std::uint64_t offset, std::span<std::uint8_t> out,
                       IoCounter c) {
  if (offset % block_size_ != 0)
    throw StoreError("unaligned read at " + std::to_string(offset) + " in " +
                     path_);
  if (std::fseek(file_, static_cast<long>(offset), SEEK_SET) != 0)
    throw StoreError("seek failed in " + path_);
  std::size_t got = std::fread(out.data(), 1, out.size(), file_);
  if (got != out.size()) {
    // Tail blocks may be short on disk; the rest reads as zeros.
    std::memset(out.data() + got, 0, out.size() - got);
    std::clearerr(file_);
  }
  charge(c, (out.size() + block_size_ - 1) / block_size_);
}

void BlockDevice::write(std::uint64_t offset,
                        std::span<const std::uint8_t> data, IoCounter c) {
  if (offset % block_size_ != 0)
    throw StoreError("unaligned write at " + std::to_string(offset) + " in " +
                     path_);
  if (std::fseek(file_, static_cast<long>(offset), SEEK_SET) != 0)
    throw StoreError("seek failed in " + path_);
  if (std::fwrite(data.data(), 1, data.size(), file_) != data.size())
    throw StoreError("write failed in " + path_);
  charge(c, (data.size() + block_size_ - 1) / block_size_);
}

void BlockDevice::sync() {
  if (std::fflush(file_) != 0) throw StoreError("flush failed in " + path_);
}

std::uint64_t BlockDevice::size_bytes() const {
  std::fflush(file_);
  long cur = std::ftell(file_);
  std::fseek(file_, 0, SEEK_END);
  long end = std::ftell(file_);
  std::fseek(file_, cur, SEEK_SET);
  return end < 0 ? 0 : static_cast<std::uint64_t>(end);
}

}  // namespace gloran
