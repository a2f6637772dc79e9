#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tba/digest.hpp"
#include "tba/util.hpp"

namespace tba {

using BeaconId = std::array<std::uint8_t, 16>;

inline constexpr std::size_t kDefaultChallengeBits = 256;

/// True-random-generator abstraction. os-entropy mode draws from the OS;
/// seeded mode is a fully deterministic stream and exists for tests only —
/// a seeded beacon is, operationally, a dishonest one (its output is
/// predictable to whoever holds the seed).
class TrgSource {
 public:
  static TrgSource os_entropy(std::size_t challenge_bits = kDefaultChallengeBits);
  static TrgSource seeded(const std::array<std::uint8_t, 32>& seed,
                          std::size_t challenge_bits = kDefaultChallengeBits);

  /// Next reveal-string, challenge_bits/8 bytes wide.
  Bytes next();

  /// Independent derived stream (seeded mode); a fresh OS source otherwise.
  TrgSource fork(std::string_view tag) const;

  std::size_t width_bytes() const { return width_bytes_; }
  bool is_seeded() const { return seeded_; }

 private:
  TrgSource(bool seeded, std::array<std::uint8_t, 32> seed, std::size_t bits);

  bool seeded_;
  std::array<std::uint8_t, 32> seed_{};
  std::uint64_t counter_{0};
  std::size_t width_bytes_;
};

/// The PCRB triple (t, h(r(t)), r(t - delta)). reveal is absent during
/// warm-up, when nothing was committed delta ticks ago.
struct BeaconEmission {
  Timestamp t{0};
  Digest commitment;
  std::optional<Bytes> reveal;

  bool operator==(const BeaconEmission&) const = default;
};

enum class BeaconFault {
  Honest,
  Equivocator,  // reveals are unrelated to the prior commitments
  Staller,      // skips configured ticks entirely
  Leaker,       // emissions honest, but r(t) is exposed at commitment time
};

/// Precommitting random beacon: single-writer state machine generating
/// fresh randomness each tick, committing now and revealing delta ticks
/// later. The archive is append-only.
class Beacon {
 public:
  Beacon(BeaconId id, std::uint64_t delta, TrgSource trg);

  void set_fault(BeaconFault kind);
  void set_stall_ticks(std::set<Timestamp> ticks);

  /// Advance to time t. Returns the emission, or nullopt when stalling.
  /// Throws Error on non-monotone t (no state change).
  std::optional<BeaconEmission> step(Timestamp t);

  const std::vector<BeaconEmission>& archive() const { return archive_; }
  const std::vector<std::pair<Timestamp, Bytes>>& leaks() const { return leaks_; }

  BeaconId id() const { return id_; }
  std::uint64_t delta() const { return delta_; }
  BeaconFault fault() const { return fault_; }

 private:
  BeaconId id_;
  std::uint64_t delta_;
  TrgSource trg_;
  std::optional<TrgSource> equivocation_trg_;
  BeaconFault fault_{BeaconFault::Honest};
  std::set<Timestamp> stall_ticks_;
  std::deque<std::pair<Timestamp, Bytes>> pending_;
  std::vector<BeaconEmission> archive_;
  std::vector<std::pair<Timestamp, Bytes>> leaks_;
  std::optional<Timestamp> last_t_;
};

enum class EmissionCheck {
  Pass,  // digest(reveal at t) == commitment at t - delta, or vacuous warm-up
  Fail,  // mismatch: the beacon equivocated
  Gap,   // archive is missing t or t - delta: a stalled beacon, not a forgery
};

EmissionCheck verify_emission(std::span<const BeaconEmission> archive, Timestamp t,
                              std::uint64_t delta);

/// JSON Lines archive: {"t": <u64>, "commit": <64 hex>, "reveal": <hex|null>}
void write_archive_jsonl(std::span<const BeaconEmission> archive, std::ostream& out);
std::vector<BeaconEmission> read_archive_jsonl(std::istream& in);

}  // namespace tba
