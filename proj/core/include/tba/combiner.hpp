#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tba/beacon.hpp"
#include "tba/util.hpp"

namespace tba {

/// One beacon's published record as the verifier sees it: identity, its
/// fixed delay, and the emission list.
struct BeaconArchive {
  BeaconId id{};
  std::uint64_t delta{0};
  std::vector<BeaconEmission> emissions;

  const BeaconEmission* find(Timestamp t) const;
  std::optional<Timestamp> last_time() const;
};

enum class ExclusionReason {
  BadCommitment,  // reveal does not hash to the earlier commitment
  Gap,            // no emission at t or t - delta
  NoReveal,       // emission present but reveal absent (warm-up)
};

const char* to_string(ExclusionReason reason);

/// XOR of the verified reveals of all passing beacons at one tick.
struct Challenge {
  Timestamp t{0};
  Bytes value;
  std::vector<BeaconId> contributors;
  std::vector<std::pair<BeaconId, ExclusionReason>> excluded;

  bool operator==(const Challenge&) const = default;
};

/// Verify each beacon's time-t emission against its archived commitment,
/// XOR the reveals of the passing ones, record exclusions with reasons.
/// Exclusion is per-tick only. Throws NoTrustworthyChallengeError when every
/// beacon is excluded.
Challenge combine_challenge(std::span<const std::optional<BeaconEmission>> emissions,
                            std::span<const BeaconArchive> archives, Timestamp t);

/// Verifier-side recomputation of the same combine from archived data alone.
/// Throws InsufficientArchiveError when any archive ends before t.
Challenge challenge_of_record(std::span<const BeaconArchive> archives, Timestamp t);

}  // namespace tba
