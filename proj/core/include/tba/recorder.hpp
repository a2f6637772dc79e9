#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tba/chunk.hpp"
#include "tba/combiner.hpp"
#include "tba/digest.hpp"
#include "tba/repository.hpp"

namespace tba {

struct SessionConfig {
  std::array<std::uint8_t, 16> session_id{};
  std::uint64_t chunk_period{1};    // ticks per chunk
  std::uint32_t marker_stride{64};  // bytes between embedded markers
  std::uint32_t marker_len{8};      // bytes per marker
  std::uint64_t bytes_per_tick{32};
  bool coupling_enabled{false};

  bool operator==(const SessionConfig&) const = default;
  void validate() const;  // throws Error on bad parameters
};

/// First marker_len bytes of h(challenge || index u64 BE || j u64 BE).
Bytes marker_bytes(const std::array<std::uint8_t, 32>& challenge, std::uint64_t index,
                   std::uint64_t j, std::uint32_t marker_len);

struct BindResult {
  Bytes payload;
  bool degenerate{false};  // payload too short to carry even one marker
};

/// Overwrite payload bytes [j*stride, j*stride+len) with marker_bytes for
/// every j that fits. The software stand-in for beacon-controlled scene
/// illumination: the binding is mechanically verifiable afterwards.
BindResult bind_challenge(Bytes payload, const std::array<std::uint8_t, 32>& challenge,
                          std::uint64_t index, const SessionConfig& cfg);

/// Digest of the secondary-modality window covering the chunk interval.
Digest couple_modalities(std::span<const std::uint8_t> secondary_window);

/// Stands in for the camera. seeded mode is deterministic given the seed.
class SceneSource {
 public:
  static SceneSource seeded(const std::array<std::uint8_t, 32>& seed);
  static SceneSource from_file(const std::filesystem::path& path);

  /// Read exactly n bytes; file mode throws Error at exhaustion.
  Bytes read(std::size_t n);

 private:
  SceneSource() = default;
  bool seeded_{false};
  std::array<std::uint8_t, 32> seed_{};
  std::uint64_t counter_{0};
  std::ifstream file_;
};

struct Receipt {
  HapId hap_id{};
  std::optional<HapRecord> record;  // absent: dropped or timed out

  bool operator==(const Receipt&) const = default;
};

/// The complete manifest of a finished session. After finalize it needs no
/// guarding; verification depends only on beacon archives and HAP logs.
struct Recording {
  SessionConfig config;
  Timestamp start_time{0};
  std::vector<Chunk> chunks;
  std::vector<ChainHead> chain;                // per chunk
  std::vector<std::vector<Receipt>> receipts;  // per chunk, per repository
  std::vector<Receipt> final_receipts;         // close-of-session submission
  std::vector<Timestamp> gaps;                 // ticks skipped for lack of a challenge

  bool operator==(const Recording&) const = default;

  Bytes header_bytes() const;
  ChainHead header_head() const;  // chain index 0
};

/// Submission content for chunk i is the chain digest itself (already a
/// hash — the client-side pre-hash discipline is preserved).
Digest chunk_submission(const ChainHead& head);
/// The close-of-session submission binds the final chain head, so a
/// shortened manifest can be detected from the logs.
Digest final_submission(const ChainHead& head);

/// One recording session: a single sequential pipeline pulling one
/// challenge per chunk, binding it, chaining, and exporting digests to
/// every configured repository.
class RecordingSession {
 public:
  using PayloadTransform = std::function<Bytes(Bytes raw, std::uint64_t chunk_index)>;

  RecordingSession(SessionConfig cfg, Timestamp start, std::vector<HapLog*> repositories);

  /// Applied to the raw scene bytes before challenge binding — the hook the
  /// discretion layer uses to record ciphertext instead of plaintext.
  void set_payload_transform(PayloadTransform transform);

  /// Record the chunk covering [t_now, t_now + chunk_period). The challenge
  /// must have arrived within that interval and be 32 bytes wide.
  /// Submissions are stamped submit_time (arrival at the logs).
  const Chunk& record_chunk(SceneSource& scene, const Challenge& challenge, Timestamp t_now,
                            Timestamp submit_time,
                            std::span<const std::uint8_t> secondary_window = {});

  /// A chunk interval with no trustworthy challenge: never recorded unbound.
  void record_gap(Timestamp t);

  /// Emit the manifest and export the closing digest. Throws Error when no
  /// chunk was recorded.
  Recording finalize(Timestamp submit_time);

  const ChainHead& head() const { return head_; }
  std::uint64_t chunks_recorded() const { return rec_.chunks.size(); }

 private:
  Recording rec_;
  std::vector<HapLog*> repositories_;
  ChainHead head_;
  PayloadTransform transform_;
  bool finalized_{false};
};

}  // namespace tba
