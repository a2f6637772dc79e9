#include "tba/chunk.hpp"

#include <algorithm>
#include <limits>

#include "tba/errors.hpp"

namespace tba {

ChainHead chain_extend(const ChainHead& head, std::span<const std::uint8_t> chunk_bytes) {
  Bytes buf;
  buf.reserve(head.digest.bytes.size() + chunk_bytes.size());
  buf.insert(buf.end(), head.digest.bytes.begin(), head.digest.bytes.end());
  buf.insert(buf.end(), chunk_bytes.begin(), chunk_bytes.end());
  return ChainHead{head.index + 1, digest(buf)};
}

Bytes canonical_chunk_bytes(const Chunk& chunk) {
  if (chunk.payload.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw FramingError("chunk payload exceeds 2^32-1 bytes");
  }
  Bytes out;
  out.reserve(kChunkFrameOverhead + chunk.payload.size());
  out.push_back(kChunkFrameVersion);
  out.insert(out.end(), chunk.session_id.begin(), chunk.session_id.end());
  put_u64_be(out, chunk.index);
  put_u64_be(out, chunk.t_start);
  put_u64_be(out, chunk.t_end);
  put_u64_be(out, chunk.challenge_time);
  out.insert(out.end(), chunk.challenge.begin(), chunk.challenge.end());
  if (chunk.coupling_digest) {
    out.insert(out.end(), chunk.coupling_digest->bytes.begin(), chunk.coupling_digest->bytes.end());
  } else {
    out.insert(out.end(), 32, 0x00);
  }
  put_u32_be(out, static_cast<std::uint32_t>(chunk.payload.size()));
  out.insert(out.end(), chunk.payload.begin(), chunk.payload.end());
  return out;
}

Chunk parse_chunk_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < kChunkFrameOverhead) throw FramingError("chunk frame too short");
  if (frame[0] != kChunkFrameVersion) throw FramingError("unknown chunk frame version");
  Chunk chunk;
  std::size_t pos = 1;
  std::copy_n(frame.begin() + pos, 16, chunk.session_id.begin());
  pos += 16;
  chunk.index = get_u64_be(frame, pos);
  pos += 8;
  chunk.t_start = get_u64_be(frame, pos);
  pos += 8;
  chunk.t_end = get_u64_be(frame, pos);
  pos += 8;
  chunk.challenge_time = get_u64_be(frame, pos);
  pos += 8;
  std::copy_n(frame.begin() + pos, 32, chunk.challenge.begin());
  pos += 32;
  Digest coupling;
  std::copy_n(frame.begin() + pos, 32, coupling.bytes.begin());
  pos += 32;
  if (coupling != Digest{}) chunk.coupling_digest = coupling;
  std::uint32_t payload_len = get_u32_be(frame, pos);
  pos += 4;
  if (frame.size() != pos + payload_len) throw FramingError("chunk frame length mismatch");
  chunk.payload.assign(frame.begin() + pos, frame.end());
  return chunk;
}

}  // namespace tba
