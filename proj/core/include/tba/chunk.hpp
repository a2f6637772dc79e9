#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "tba/digest.hpp"
#include "tba/util.hpp"

namespace tba {

/// Head of the linear hash chain over a recording's chunks.
/// Index 0 is the digest of the recording header alone.
struct ChainHead {
  std::uint64_t index{0};
  Digest digest;

  auto operator<=>(const ChainHead&) const = default;
};

/// new digest = h(head.digest || chunk_bytes), index advances by one.
ChainHead chain_extend(const ChainHead& head, std::span<const std::uint8_t> chunk_bytes);

/// One challenge-bound slice of the recorded stream.
struct Chunk {
  std::uint64_t index{0};
  std::array<std::uint8_t, 16> session_id{};
  Timestamp t_start{0};
  Timestamp t_end{0};
  Timestamp challenge_time{0};
  std::array<std::uint8_t, 32> challenge{};
  std::optional<Digest> coupling_digest;
  Bytes payload;

  bool operator==(const Chunk&) const = default;
};

/// Frame overhead: version byte + session id + four u64 fields + challenge
/// + coupling digest + payload length.
inline constexpr std::size_t kChunkFrameOverhead = 1 + 16 + 8 + 8 + 8 + 8 + 32 + 32 + 4;
inline constexpr std::uint8_t kChunkFrameVersion = 0x01;

/// Bit-exact canonical frame; all implementations hash exactly these bytes.
/// Layout: version 0x01 || session_id(16) || index u64 BE || t_start u64 BE
/// || t_end u64 BE || challenge_time u64 BE || challenge(32) || coupling(32,
/// all-zero when absent) || payload_length u32 BE || payload.
/// Throws FramingError when the payload exceeds 2^32-1 bytes.
Bytes canonical_chunk_bytes(const Chunk& chunk);

/// Inverse of canonical_chunk_bytes; throws FramingError on malformed input.
Chunk parse_chunk_frame(std::span<const std::uint8_t> frame);

}  // namespace tba
