#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tba {

using Bytes = std::vector<std::uint8_t>;

/// Simulator ticks in simulation mode, milliseconds since Unix epoch in
/// real mode. Monotone non-decreasing within any single log or archive.
using Timestamp = std::uint64_t;

std::string to_hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view hex);

std::string base64_encode(std::span<const std::uint8_t> data);
Bytes base64_decode(std::string_view text);

void put_u32_be(Bytes& out, std::uint32_t v);
void put_u64_be(Bytes& out, std::uint64_t v);
std::uint32_t get_u32_be(std::span<const std::uint8_t> in, std::size_t offset);
std::uint64_t get_u64_be(std::span<const std::uint8_t> in, std::size_t offset);

/// Wall clock in milliseconds since the Unix epoch (real-mode timestamps).
Timestamp now_ms();

inline std::span<const std::uint8_t> as_span(const Bytes& b) {
  return {b.data(), b.size()};
}
inline std::span<const std::uint8_t> as_span(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace tba
