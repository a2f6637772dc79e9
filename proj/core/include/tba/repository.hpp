#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tba/digest.hpp"
#include "tba/util.hpp"

namespace tba {

using HapId = std::array<std::uint8_t, 16>;

/// An append-only published (t, v) pair. v = h(s) for the submitted s.
struct HapRecord {
  Timestamp t{0};
  Digest v;

  bool operator==(const HapRecord&) const = default;
};

enum class HapFault {
  Honest,
  Dropper,   // silently discards submissions
  Rewriter,  // appends honestly but may mutate records afterwards
};

/// Client-side pre-hash: s = h(c). The only thing a client ever sends —
/// content never leaves the client.
Digest prepare_submission(std::span<const std::uint8_t> content);

/// A hash-and-publish log. Single-writer append, concurrent snapshot reads.
/// The log stores 32-byte digests and nothing else.
class HapLog {
 public:
  HapLog() = default;
  HapLog(HapId id, HapFault fault = HapFault::Honest);

  /// Append (t_now, h(s)) and return the record. A dropper returns nullopt.
  /// Throws Error on non-monotone t_now.
  std::optional<HapRecord> submit(const Digest& s, Timestamp t_now);

  /// Earliest receipt time of v, or nullopt if never published here.
  std::optional<Timestamp> lookup(const Digest& v) const;

  const std::vector<HapRecord>& records() const { return records_; }
  HapId id() const { return id_; }
  HapFault fault() const { return fault_; }

  // Post-hoc mutation, only legal on a Rewriter log (detection tests).
  void rewrite_record(std::size_t index, const Digest& new_v);
  void erase_record(std::size_t index);

  void set_records(std::vector<HapRecord> records) { records_ = std::move(records); }

 private:
  HapId id_{};
  HapFault fault_{HapFault::Honest};
  std::vector<HapRecord> records_;
};

/// True iff strictly more than half the logs hold v = h(s) with earliest
/// receipt time <= t_max.
bool verify_majority(std::span<const HapLog> logs, const Digest& s, Timestamp t_max);

/// Earliest instant at which a strict majority held h(s): the
/// ceil((m+1)/2)-th smallest per-log earliest receipt time. nullopt when a
/// majority never holds.
std::optional<Timestamp> majority_time(std::span<const HapLog> logs, const Digest& s);

/// Records present in the mirror but missing or altered in the log —
/// divergence flags a rewriter.
std::vector<HapRecord> divergent_records(const HapLog& log, const HapLog& mirror);

/// JSON Lines log file: {"t": <u64>, "v": <64 hex>}
void write_log_jsonl(const HapLog& log, std::ostream& out);
std::vector<HapRecord> read_log_jsonl(std::istream& in);

}  // namespace tba
