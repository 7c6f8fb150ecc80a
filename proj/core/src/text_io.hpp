#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "bandsleep/errors.hpp"

namespace bandsleep::detail {

/// Strict unsigned parse of a whole field; rejects signs, blanks, leftovers.
inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline bool parse_u32(std::string_view s, std::uint32_t& out) {
  std::uint64_t v;
  if (!parse_u64(s, v) || v > 0xFFFFFFFFull) return false;
  out = static_cast<std::uint32_t>(v);
  return true;
}

/// Shortest round-trip decimal form of a double (deterministic output).
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

/// Strips one trailing '\r' (CRLF input).
inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace bandsleep::detail
