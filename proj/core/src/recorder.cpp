#include "tba/recorder.hpp"

#include <utility>

#include "tba/errors.hpp"

namespace tba {

namespace {

constexpr std::uint8_t kHeaderVersion = 0x02;
constexpr std::uint8_t kFinalTag = 0xff;

}  // namespace

void SessionConfig::validate() const {
  if (chunk_period < 1) throw Error("chunk_period must be at least 1");
  if (marker_len > 32) throw Error("marker_len must be at most 32");
  if (marker_stride <= marker_len) throw Error("marker_stride must exceed marker_len");
  if (bytes_per_tick == 0) throw Error("bytes_per_tick must be positive");
}

Bytes marker_bytes(const std::array<std::uint8_t, 32>& challenge, std::uint64_t index,
                   std::uint64_t j, std::uint32_t marker_len) {
  Bytes input(challenge.begin(), challenge.end());
  put_u64_be(input, index);
  put_u64_be(input, j);
  Digest d = digest(input);
  return Bytes(d.bytes.begin(), d.bytes.begin() + marker_len);
}

BindResult bind_challenge(Bytes payload, const std::array<std::uint8_t, 32>& challenge,
                          std::uint64_t index, const SessionConfig& cfg) {
  if (payload.empty()) throw Error("bind_challenge requires a non-empty payload");
  if (payload.size() < cfg.marker_len) return {std::move(payload), true};
  for (std::uint64_t j = 0;; ++j) {
    const std::uint64_t offset = j * cfg.marker_stride;
    if (offset + cfg.marker_len > payload.size()) break;
    Bytes marker = marker_bytes(challenge, index, j, cfg.marker_len);
    std::copy(marker.begin(), marker.end(), payload.begin() + static_cast<std::ptrdiff_t>(offset));
  }
  return {std::move(payload), false};
}

Digest couple_modalities(std::span<const std::uint8_t> secondary_window) {
  return digest(secondary_window);
}

SceneSource SceneSource::seeded(const std::array<std::uint8_t, 32>& seed) {
  SceneSource s;
  s.seeded_ = true;
  s.seed_ = seed;
  return s;
}

SceneSource SceneSource::from_file(const std::filesystem::path& path) {
  SceneSource s;
  s.file_.open(path, std::ios::binary);
  if (!s.file_) throw Error("cannot open scene file: " + path.string());
  return s;
}

Bytes SceneSource::read(std::size_t n) {
  if (seeded_) {
    Bytes out;
    out.reserve(n);
    while (out.size() < n) {
      Bytes input(seed_.begin(), seed_.end());
      put_u64_be(input, counter_++);
      Digest block = digest(input);
      const std::size_t take = std::min<std::size_t>(32, n - out.size());
      out.insert(out.end(), block.bytes.begin(), block.bytes.begin() + take);
    }
    return out;
  }
  Bytes out(n);
  file_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(file_.gcount()) != n) throw Error("scene file exhausted");
  return out;
}

Bytes Recording::header_bytes() const {
  Bytes out;
  out.push_back(kHeaderVersion);
  out.insert(out.end(), config.session_id.begin(), config.session_id.end());
  put_u64_be(out, start_time);
  put_u64_be(out, config.chunk_period);
  put_u32_be(out, config.marker_stride);
  put_u32_be(out, config.marker_len);
  put_u64_be(out, config.bytes_per_tick);
  out.push_back(config.coupling_enabled ? 0x01 : 0x00);
  return out;
}

ChainHead Recording::header_head() const { return ChainHead{0, digest(header_bytes())}; }

Digest chunk_submission(const ChainHead& head) { return Digest{head.digest}; }

Digest final_submission(const ChainHead& head) {
  Bytes input;
  input.push_back(kFinalTag);
  input.insert(input.end(), head.digest.bytes.begin(), head.digest.bytes.end());
  return digest(input);
}

RecordingSession::RecordingSession(SessionConfig cfg, Timestamp start,
                                   std::vector<HapLog*> repositories)
    : repositories_(std::move(repositories)) {
  cfg.validate();
  rec_.config = cfg;
  rec_.start_time = start;
  head_ = rec_.header_head();
}

const Chunk& RecordingSession::record_chunk(SceneSource& scene, const Challenge& challenge,
                                            Timestamp t_now, Timestamp submit_time,
                                            std::span<const std::uint8_t> secondary_window) {
  if (finalized_) throw Error("session already finalized");
  if (challenge.value.size() != 32) throw Error("recording requires 32-byte challenges");

  Chunk chunk;
  chunk.index = rec_.chunks.size();
  chunk.session_id = rec_.config.session_id;
  chunk.t_start = t_now;
  chunk.t_end = t_now + rec_.config.chunk_period;
  chunk.challenge_time = challenge.t;
  std::copy(challenge.value.begin(), challenge.value.end(), chunk.challenge.begin());
  if (challenge.t < chunk.t_start || challenge.t > chunk.t_end) {
    throw Error("challenge did not arrive within the chunk interval");
  }

  Bytes raw = scene.read(rec_.config.chunk_period * rec_.config.bytes_per_tick);
  if (transform_) raw = transform_(std::move(raw), chunk.index);
  chunk.payload = bind_challenge(std::move(raw), chunk.challenge, chunk.index, rec_.config).payload;
  if (rec_.config.coupling_enabled) {
    chunk.coupling_digest = couple_modalities(secondary_window);
  }

  head_ = chain_extend(head_, canonical_chunk_bytes(chunk));

  std::vector<Receipt> receipts;
  const Digest s = prepare_submission(chunk_submission(head_).span());
  for (HapLog* repo : repositories_) {
    receipts.push_back(Receipt{repo->id(), repo->submit(s, submit_time)});
  }

  rec_.chunks.push_back(std::move(chunk));
  rec_.chain.push_back(head_);
  rec_.receipts.push_back(std::move(receipts));
  return rec_.chunks.back();
}

void RecordingSession::set_payload_transform(PayloadTransform transform) {
  transform_ = std::move(transform);
}

void RecordingSession::record_gap(Timestamp t) { rec_.gaps.push_back(t); }

Recording RecordingSession::finalize(Timestamp submit_time) {
  if (finalized_) throw Error("session already finalized");
  if (rec_.chunks.empty()) throw Error("cannot finalize a recording with zero chunks");
  const Digest s = prepare_submission(final_submission(head_).span());
  for (HapLog* repo : repositories_) {
    rec_.final_receipts.push_back(Receipt{repo->id(), repo->submit(s, submit_time)});
  }
  finalized_ = true;
  return rec_;
}

}  // namespace tba
