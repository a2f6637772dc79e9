#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tba/combiner.hpp"
#include "tba/recorder.hpp"
#include "tba/repository.hpp"

namespace tba {

enum class CheckStatus { Pass, Fail, Degraded, NotApplicable };

const char* to_string(CheckStatus status);

struct Finding {
  std::uint64_t chunk_index{0};
  std::string check;
  CheckStatus status{CheckStatus::Pass};
  std::string detail;
};

/// Bracket for one chunk: provably made no earlier than t_past (challenge
/// reveal time) and no later than t_future (earliest majority publication).
struct TimeBracket {
  std::uint64_t chunk_index{0};
  Timestamp t_past{0};
  Timestamp t_future{0};
  std::uint64_t width{0};
};

enum class OverallVerdict { Authentic, Tampered, Unverifiable };

const char* to_string(OverallVerdict verdict);
int exit_code(OverallVerdict verdict);  // 0 authentic, 1 tampered, 2 unverifiable

/// Recompute the chain from the header and canonical chunk bytes.
/// Returns the first failing index, or nullopt on pass. A chunk-count /
/// chain-length mismatch fails at the shorter length.
std::optional<std::uint64_t> verify_chain(const Recording& rec);

struct PastCheck {
  CheckStatus status{CheckStatus::Pass};
  Timestamp t_past{0};
  std::string detail;
};

/// Per chunk: recompute the challenge of record, compare to the stored
/// challenge, and re-derive every embedded marker. t_past is the reveal
/// time — commitments are hiding, so knowledge of the challenge begins at
/// reveal, not at commitment.
std::vector<PastCheck> verify_past(const Recording& rec, std::span<const BeaconArchive> archives);

struct FutureCheck {
  CheckStatus status{CheckStatus::Pass};
  Timestamp t_future{0};
};

std::vector<FutureCheck> verify_future(const Recording& rec, std::span<const HapLog> logs);

/// Recompute each chunk's secondary-window digest from the full secondary
/// track and compare to the stored coupling digest.
std::vector<CheckStatus> verify_coupling(const Recording& rec,
                                         std::span<const std::uint8_t> secondary_track);

struct BracketReport {
  OverallVerdict overall{OverallVerdict::Authentic};
  std::vector<Finding> findings;
  std::vector<TimeBracket> brackets;
  std::uint64_t max_width{0};
};

BracketReport bracket_report(const Recording& rec, std::span<const BeaconArchive> archives,
                             std::span<const HapLog> logs,
                             std::optional<std::span<const std::uint8_t>> secondary_track = {});

std::string report_to_json(const BracketReport& report);

}  // namespace tba
