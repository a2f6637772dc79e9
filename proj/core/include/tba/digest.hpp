#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "tba/util.hpp"

namespace tba {

/// 32-byte SHA-256 output — the universal currency of commitments, chains,
/// and publications. SHA-256 is the project's sole hash primitive.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  auto operator<=>(const Digest&) const = default;

  std::string hex() const;
  static Digest from_hex(std::string_view hex);

  std::span<const std::uint8_t> span() const { return {bytes.data(), bytes.size()}; }
};

Digest digest(std::span<const std::uint8_t> data);
Digest digest(const Bytes& data);
Digest digest(std::string_view data);

/// Lowercase hex of the first 8 bytes of d: the 64-bit (16 hex digit)
/// truncated form used by the lite workflow.
std::string truncate_hex64(const Digest& d);

}  // namespace tba
