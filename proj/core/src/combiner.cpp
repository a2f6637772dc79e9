#include "tba/combiner.hpp"

#include "tba/errors.hpp"

namespace tba {

const BeaconEmission* BeaconArchive::find(Timestamp t) const {
  for (const auto& e : emissions) {
    if (e.t == t) return &e;
  }
  return nullptr;
}

std::optional<Timestamp> BeaconArchive::last_time() const {
  if (emissions.empty()) return std::nullopt;
  return emissions.back().t;
}

const char* to_string(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::BadCommitment: return "bad-commitment";
    case ExclusionReason::Gap: return "gap";
    case ExclusionReason::NoReveal: return "no-reveal";
  }
  return "?";
}

Challenge combine_challenge(std::span<const std::optional<BeaconEmission>> emissions,
                            std::span<const BeaconArchive> archives, Timestamp t) {
  if (emissions.size() != archives.size()) {
    throw Error("one emission slot per configured beacon required");
  }
  Challenge challenge;
  challenge.t = t;
  for (std::size_t i = 0; i < archives.size(); ++i) {
    const BeaconArchive& archive = archives[i];
    const std::optional<BeaconEmission>& emission = emissions[i];
    if (!emission || emission->t != t) {
      challenge.excluded.emplace_back(archive.id, ExclusionReason::Gap);
      continue;
    }
    if (!emission->reveal) {
      challenge.excluded.emplace_back(archive.id, ExclusionReason::NoReveal);
      continue;
    }
    switch (verify_emission(archive.emissions, t, archive.delta)) {
      case EmissionCheck::Gap:
        challenge.excluded.emplace_back(archive.id, ExclusionReason::Gap);
        continue;
      case EmissionCheck::Fail:
        challenge.excluded.emplace_back(archive.id, ExclusionReason::BadCommitment);
        continue;
      case EmissionCheck::Pass:
        break;
    }
    const Bytes& reveal = *emission->reveal;
    if (challenge.contributors.empty()) {
      challenge.value = reveal;
    } else {
      if (reveal.size() != challenge.value.size()) {
        throw Error("beacons disagree on challenge width");
      }
      for (std::size_t k = 0; k < reveal.size(); ++k) challenge.value[k] ^= reveal[k];
    }
    challenge.contributors.push_back(archive.id);
  }
  if (challenge.contributors.empty()) {
    throw NoTrustworthyChallengeError("all beacons excluded at tick " + std::to_string(t));
  }
  return challenge;
}

Challenge challenge_of_record(std::span<const BeaconArchive> archives, Timestamp t) {
  std::vector<std::optional<BeaconEmission>> emissions;
  emissions.reserve(archives.size());
  for (const BeaconArchive& archive : archives) {
    auto last = archive.last_time();
    if (!last || *last < t) {
      throw InsufficientArchiveError("beacon archive ends before tick " + std::to_string(t));
    }
    const BeaconEmission* e = archive.find(t);
    if (e != nullptr) {
      emissions.emplace_back(*e);
    } else {
      emissions.emplace_back(std::nullopt);  // covered but skipped: a stall
    }
  }
  return combine_challenge(emissions, archives, t);
}

}  // namespace tba
