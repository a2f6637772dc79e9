#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tba/beacon.hpp"
#include "tba/digest.hpp"
#include "tba/util.hpp"

namespace tba {

using ParticipantId = std::array<std::uint8_t, 16>;

/// Per-segment encryption key. Each conversation segment gets a fresh one.
struct SegmentKey {
  std::array<std::uint8_t, 32> key{};
  std::uint64_t segment_id{0};
  Digest checksum;  // h(key || segment_id u64 BE)

  bool operator==(const SegmentKey&) const = default;
};

Digest key_checksum(std::span<const std::uint8_t> key, std::uint64_t segment_id);

SegmentKey gen_segment_key(std::uint64_t segment_id, TrgSource& entropy);

/// Hash-in-counter-mode keystream XOR. Applying it twice with the same key
/// is the identity, so this is both encrypt and decrypt.
/// Keystream block i = h(key || segment_id u64 BE || i u64 BE).
/// start_block lets a caller continue a segment's stream mid-way.
Bytes apply_keystream(std::span<const std::uint8_t> key, std::uint64_t segment_id,
                      std::span<const std::uint8_t> data, std::uint64_t start_block = 0);

/// n-of-n XOR sharing over arbitrary-width secrets. Shares 1..n-1 are fresh
/// random strings; the last share closes the XOR to the secret. Any n-1
/// shares leave the posterior over secrets uniform.
std::vector<Bytes> xor_split(std::span<const std::uint8_t> secret, std::size_t n,
                             TrgSource& entropy);
Bytes xor_combine(std::span<const Bytes> shares);

struct Share {
  ParticipantId participant{};
  std::uint64_t segment_id{0};
  Bytes value;

  bool operator==(const Share&) const = default;
};

/// Access structure for one segment of the session timeline.
struct AccessRecord {
  std::uint64_t segment_id{0};
  Timestamp t_start{0};
  Timestamp t_end{0};
  std::vector<ParticipantId> participants;
  Digest checksum;
  std::array<std::uint8_t, 32> escrow{};  // court-override pad ciphertext

  bool operator==(const AccessRecord&) const = default;
};

std::vector<Share> split_key(const SegmentKey& key, std::span<const ParticipantId> participants,
                             TrgSource& entropy);

/// XOR all share values and accept iff the checksum in the record matches.
/// Throws ShareError otherwise — deliberately without saying whether a
/// share was missing or corrupted.
SegmentKey reconstruct_key(std::span<const Share> shares, const AccessRecord& expected);

/// blob = key XOR h(court_key || segment_id u64 BE): the court opens a
/// segment alone, overruling the participant quorum.
std::array<std::uint8_t, 32> court_escrow(const SegmentKey& key,
                                          const std::array<std::uint8_t, 32>& court_key);
SegmentKey court_open(const std::array<std::uint8_t, 32>& blob, std::uint64_t segment_id,
                      const std::array<std::uint8_t, 32>& court_key, const Digest& checksum);

struct PresenceEvent {
  Timestamp t{0};
  std::vector<ParticipantId> present;
};

struct SegmentInterval {
  Timestamp t_start{0};
  Timestamp t_end{0};
  std::vector<ParticipantId> participants;

  bool operator==(const SegmentInterval&) const = default;
};

/// A new segment begins at every change of the participant set. Intervals
/// with an empty room are recording gaps, not segments. Throws Error on an
/// empty presence log.
std::vector<SegmentInterval> segment_session(std::span<const PresenceEvent> presence_log,
                                             Timestamp session_end);

/// Share file: {"participant": <hex>, "segment": <u64>, "value": <hex>}
std::string share_to_json(const Share& share);
Share share_from_json(std::string_view json_text);

}  // namespace tba
