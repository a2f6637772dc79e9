#include "tba/discretion.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tba/errors.hpp"

namespace tba {

Digest key_checksum(std::span<const std::uint8_t> key, std::uint64_t segment_id) {
  Bytes input(key.begin(), key.end());
  put_u64_be(input, segment_id);
  return digest(input);
}

SegmentKey gen_segment_key(std::uint64_t segment_id, TrgSource& entropy) {
  if (entropy.width_bytes() != 32) throw Error("segment keys require a 32-byte entropy source");
  SegmentKey k;
  Bytes raw = entropy.next();
  std::copy(raw.begin(), raw.end(), k.key.begin());
  k.segment_id = segment_id;
  k.checksum = key_checksum(k.key, segment_id);
  return k;
}

Bytes apply_keystream(std::span<const std::uint8_t> key, std::uint64_t segment_id,
                      std::span<const std::uint8_t> data, std::uint64_t start_block) {
  Bytes out(data.begin(), data.end());
  for (std::size_t block = 0; block * 32 < out.size(); ++block) {
    Bytes input(key.begin(), key.end());
    put_u64_be(input, segment_id);
    put_u64_be(input, start_block + block);
    Digest pad = digest(input);
    const std::size_t base = block * 32;
    const std::size_t len = std::min<std::size_t>(32, out.size() - base);
    for (std::size_t k = 0; k < len; ++k) out[base + k] ^= pad.bytes[k];
  }
  return out;
}

std::vector<Bytes> xor_split(std::span<const std::uint8_t> secret, std::size_t n,
                             TrgSource& entropy) {
  if (n == 0) throw Error("secret sharing requires at least one participant");
  if (entropy.width_bytes() < secret.size()) {
    throw Error("entropy source narrower than the secret");
  }
  std::vector<Bytes> shares;
  shares.reserve(n);
  Bytes last(secret.begin(), secret.end());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Bytes fresh = entropy.next();
    fresh.resize(secret.size());
    for (std::size_t k = 0; k < secret.size(); ++k) last[k] ^= fresh[k];
    shares.push_back(std::move(fresh));
  }
  shares.push_back(std::move(last));
  return shares;
}

Bytes xor_combine(std::span<const Bytes> shares) {
  if (shares.empty()) throw Error("cannot combine zero shares");
  Bytes out = shares.front();
  for (std::size_t i = 1; i < shares.size(); ++i) {
    if (shares[i].size() != out.size()) throw Error("share width mismatch");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] ^= shares[i][k];
  }
  return out;
}

std::vector<Share> split_key(const SegmentKey& key, std::span<const ParticipantId> participants,
                             TrgSource& entropy) {
  if (participants.empty()) throw Error("secret sharing requires at least one participant");
  std::vector<Bytes> values = xor_split(key.key, participants.size(), entropy);
  std::vector<Share> shares;
  shares.reserve(participants.size());
  for (std::size_t i = 0; i < participants.size(); ++i) {
    shares.push_back(Share{participants[i], key.segment_id, std::move(values[i])});
  }
  return shares;
}

SegmentKey reconstruct_key(std::span<const Share> shares, const AccessRecord& expected) {
  if (shares.empty()) throw ShareError("insufficient or corrupted shares");
  std::vector<Bytes> values;
  values.reserve(shares.size());
  for (const Share& s : shares) {
    if (s.segment_id != expected.segment_id) throw ShareError("share segment mismatch");
    values.push_back(s.value);
  }
  Bytes combined = xor_combine(values);
  if (combined.size() != 32 || key_checksum(combined, expected.segment_id) != expected.checksum) {
    throw ShareError("insufficient or corrupted shares");
  }
  SegmentKey k;
  std::copy(combined.begin(), combined.end(), k.key.begin());
  k.segment_id = expected.segment_id;
  k.checksum = expected.checksum;
  return k;
}

namespace {

Digest escrow_pad(const std::array<std::uint8_t, 32>& court_key, std::uint64_t segment_id) {
  Bytes input(court_key.begin(), court_key.end());
  put_u64_be(input, segment_id);
  return digest(input);
}

}  // namespace

std::array<std::uint8_t, 32> court_escrow(const SegmentKey& key,
                                          const std::array<std::uint8_t, 32>& court_key) {
  Digest pad = escrow_pad(court_key, key.segment_id);
  std::array<std::uint8_t, 32> blob{};
  for (std::size_t k = 0; k < 32; ++k) blob[k] = key.key[k] ^ pad.bytes[k];
  return blob;
}

SegmentKey court_open(const std::array<std::uint8_t, 32>& blob, std::uint64_t segment_id,
                      const std::array<std::uint8_t, 32>& court_key, const Digest& checksum) {
  Digest pad = escrow_pad(court_key, segment_id);
  SegmentKey k;
  for (std::size_t i = 0; i < 32; ++i) k.key[i] = blob[i] ^ pad.bytes[i];
  k.segment_id = segment_id;
  if (key_checksum(k.key, segment_id) != checksum) {
    throw ShareError("court key does not open this segment");
  }
  k.checksum = checksum;
  return k;
}

std::vector<SegmentInterval> segment_session(std::span<const PresenceEvent> presence_log,
                                             Timestamp session_end) {
  if (presence_log.empty()) throw Error("presence log is empty");
  std::vector<SegmentInterval> out;
  for (std::size_t i = 0; i < presence_log.size(); ++i) {
    if (i + 1 < presence_log.size() && presence_log[i + 1].t < presence_log[i].t) {
      throw Error("presence log must be time-sorted");
    }
    const Timestamp start = presence_log[i].t;
    const Timestamp end = i + 1 < presence_log.size() ? presence_log[i + 1].t : session_end;
    if (end <= start) continue;  // momentary change, no interval to cover
    if (presence_log[i].present.empty()) continue;  // empty room: recording gap, not a segment
    if (!out.empty() && out.back().participants == presence_log[i].present &&
        out.back().t_end == start) {
      out.back().t_end = end;  // set unchanged across the event
      continue;
    }
    out.push_back(SegmentInterval{start, end, presence_log[i].present});
  }
  return out;
}

std::string share_to_json(const Share& share) {
  nlohmann::json j;
  j["participant"] = to_hex(share.participant);
  j["segment"] = share.segment_id;
  j["value"] = to_hex(as_span(share.value));
  return j.dump();
}

Share share_from_json(std::string_view json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  Share s;
  Bytes pid = from_hex(j.at("participant").get<std::string>());
  if (pid.size() != 16) throw Error("participant id must be 16 bytes");
  std::copy(pid.begin(), pid.end(), s.participant.begin());
  s.segment_id = j.at("segment").get<std::uint64_t>();
  s.value = from_hex(j.at("value").get<std::string>());
  return s;
}

}  // namespace tba
