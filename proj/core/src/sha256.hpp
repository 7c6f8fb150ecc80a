#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bandsleep::detail {

/// Incremental SHA-256, enough for manifest checksums.
class Sha256 {
public:
  Sha256();
  void update(const void* data, std::size_t len);
  std::string hex_digest();

private:
  void process_block(const std::uint8_t* block);

  std::uint32_t state_[8];
  std::uint64_t total_len_ = 0;
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
};

}  // namespace bandsleep::detail
