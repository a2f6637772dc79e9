#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tba/beacon.hpp"
#include "tba/combiner.hpp"
#include "tba/recorder.hpp"
#include "tba/repository.hpp"
#include "tba/verifier.hpp"

namespace tba {

enum class AdversaryKind {
  None,
  Forger,         // holds all public commitments, no reveal before its tick
  PostHocEditor,  // mutates the finished recording after publication
};

struct MutationSpec {
  enum class Kind {
    None,
    FlipPayloadByte,
    FlipChallengeByte,
    FlipCouplingByte,
    BumpTimestamp,
    SwapChunks,
    DeleteChunk,
  };
  Kind kind{Kind::None};
  std::uint64_t chunk{0};
  std::uint64_t offset{0};  // byte offset (payload/challenge/coupling)
  std::uint64_t other{0};   // second chunk for SwapChunks
};

struct BeaconSpec {
  BeaconFault fault{BeaconFault::Honest};
  std::set<Timestamp> stall_ticks;
};

struct ScenarioConfig {
  std::uint64_t seed{1};
  std::uint64_t ticks{0};  // 0: just enough for the configured chunks
  std::uint64_t delta{3};
  std::uint64_t chunk_period{5};
  std::uint64_t chunk_count{10};
  std::uint64_t net_delay{1};  // ticks per message, recorder -> repository
  std::vector<BeaconSpec> beacons{{}, {}, {}};
  std::vector<HapFault> repositories{HapFault::Honest, HapFault::Honest, HapFault::Honest,
                                     HapFault::Honest, HapFault::Honest};
  std::uint64_t bytes_per_tick{32};
  bool coupling{false};
  bool encrypted{false};
  AdversaryKind adversary{AdversaryKind::None};
  MutationSpec mutation;

  void validate() const;  // throws Error before any run
};

struct ScenarioReport {
  std::string verdict;
  std::vector<TimeBracket> brackets;
  std::uint64_t max_width{0};
  std::vector<std::string> fault_events;
  bool adversary_success{false};
};

/// Everything a scenario produced, for tests that inspect internals.
struct ScenarioArtifacts {
  Recording recording;  // the recording under examination (the adversary's, if any)
  std::vector<BeaconArchive> archives;
  std::vector<HapLog> logs;
  Bytes secondary_track;
  ScenarioReport report;
};

/// Single-threaded, fully deterministic given the config. Advances a global
/// tick clock: beacons step each tick, messages deliver after net_delay
/// ticks, the recorder advances chunk by chunk; at the end the verifier
/// runs against the simulated archives and logs.
ScenarioReport run_scenario(const ScenarioConfig& cfg);
ScenarioArtifacts run_scenario_full(const ScenarioConfig& cfg);

/// Drives the post-hoc-editor adversary. Throws Error on out-of-range targets.
Recording mutate_after_publication(const Recording& rec, const MutationSpec& spec);

std::string scenario_config_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_config_from_json(std::string_view json_text);
std::string scenario_report_to_json(const ScenarioReport& report);

}  // namespace tba
