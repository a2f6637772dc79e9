#include "tba/verifier.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tba/errors.hpp"

namespace tba {

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Degraded: return "degraded";
    case CheckStatus::NotApplicable: return "not-applicable";
  }
  return "?";
}

const char* to_string(OverallVerdict verdict) {
  switch (verdict) {
    case OverallVerdict::Authentic: return "authentic";
    case OverallVerdict::Tampered: return "tampered";
    case OverallVerdict::Unverifiable: return "unverifiable";
  }
  return "?";
}

int exit_code(OverallVerdict verdict) {
  switch (verdict) {
    case OverallVerdict::Authentic: return 0;
    case OverallVerdict::Tampered: return 1;
    case OverallVerdict::Unverifiable: return 2;
  }
  return 2;
}

std::optional<std::uint64_t> verify_chain(const Recording& rec) {
  if (rec.chain.size() != rec.chunks.size()) {
    return std::min(rec.chain.size(), rec.chunks.size());
  }
  ChainHead head = rec.header_head();
  for (std::size_t i = 0; i < rec.chunks.size(); ++i) {
    head = chain_extend(head, canonical_chunk_bytes(rec.chunks[i]));
    if (head.digest != rec.chain[i].digest) return i;
  }
  return std::nullopt;
}

std::vector<PastCheck> verify_past(const Recording& rec, std::span<const BeaconArchive> archives) {
  std::vector<PastCheck> out;
  out.reserve(rec.chunks.size());
  for (const Chunk& chunk : rec.chunks) {
    PastCheck check;
    check.t_past = chunk.challenge_time;
    Challenge of_record;
    try {
      of_record = challenge_of_record(archives, chunk.challenge_time);
    } catch (const InsufficientArchiveError& e) {
      check.status = CheckStatus::Degraded;
      check.detail = e.what();
      out.push_back(std::move(check));
      continue;
    } catch (const NoTrustworthyChallengeError& e) {
      check.status = CheckStatus::Fail;
      check.detail = e.what();
      out.push_back(std::move(check));
      continue;
    }
    if (of_record.value.size() != chunk.challenge.size() ||
        !std::equal(of_record.value.begin(), of_record.value.end(), chunk.challenge.begin())) {
      check.status = CheckStatus::Fail;
      check.detail = "stored challenge disagrees with the challenge of record";
      out.push_back(std::move(check));
      continue;
    }
    // The challenge matches; now the markers must be the ones it dictates.
    bool markers_ok = true;
    if (chunk.payload.size() >= rec.config.marker_len) {
      for (std::uint64_t j = 0;; ++j) {
        const std::uint64_t offset = j * rec.config.marker_stride;
        if (offset + rec.config.marker_len > chunk.payload.size()) break;
        Bytes expected = marker_bytes(chunk.challenge, chunk.index, j, rec.config.marker_len);
        if (!std::equal(expected.begin(), expected.end(),
                        chunk.payload.begin() + static_cast<std::ptrdiff_t>(offset))) {
          markers_ok = false;
          break;
        }
      }
    }
    if (!markers_ok) {
      check.status = CheckStatus::Fail;
      check.detail = "embedded markers do not match the challenge";
    }
    out.push_back(std::move(check));
  }
  return out;
}

std::vector<FutureCheck> verify_future(const Recording& rec, std::span<const HapLog> logs) {
  std::vector<FutureCheck> out;
  const std::size_t n = std::min(rec.chunks.size(), rec.chain.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    FutureCheck check;
    if (logs.empty()) {
      check.status = CheckStatus::Degraded;
      out.push_back(check);
      continue;
    }
    const Digest s = prepare_submission(chunk_submission(rec.chain[i]).span());
    if (auto t = majority_time(logs, s)) {
      check.t_future = *t;
    } else {
      check.status = CheckStatus::Fail;
    }
    out.push_back(check);
  }
  return out;
}

std::vector<CheckStatus> verify_coupling(const Recording& rec,
                                         std::span<const std::uint8_t> secondary_track) {
  std::vector<CheckStatus> out;
  out.reserve(rec.chunks.size());
  for (const Chunk& chunk : rec.chunks) {
    if (!rec.config.coupling_enabled || !chunk.coupling_digest) {
      out.push_back(CheckStatus::NotApplicable);
      continue;
    }
    const std::uint64_t offset = (chunk.t_start - rec.start_time) * rec.config.bytes_per_tick;
    const std::uint64_t len = rec.config.chunk_period * rec.config.bytes_per_tick;
    if (offset + len > secondary_track.size()) {
      out.push_back(CheckStatus::Degraded);
      continue;
    }
    Digest recomputed = couple_modalities(secondary_track.subspan(offset, len));
    out.push_back(recomputed == *chunk.coupling_digest ? CheckStatus::Pass : CheckStatus::Fail);
  }
  return out;
}

BracketReport bracket_report(const Recording& rec, std::span<const BeaconArchive> archives,
                             std::span<const HapLog> logs,
                             std::optional<std::span<const std::uint8_t>> secondary_track) {
  BracketReport report;
  bool any_fail = false;
  bool any_degraded = false;

  auto note = [&](std::uint64_t index, const char* check, CheckStatus status,
                  std::string detail = {}) {
    if (status == CheckStatus::Fail) any_fail = true;
    if (status == CheckStatus::Degraded) any_degraded = true;
    report.findings.push_back(Finding{index, check, status, std::move(detail)});
  };

  if (auto bad = verify_chain(rec)) {
    note(*bad, "chain", CheckStatus::Fail, "chain recomputation diverges");
  }

  std::vector<PastCheck> past;
  if (archives.empty()) {
    any_degraded = true;
    report.findings.push_back(Finding{0, "past", CheckStatus::Degraded, "no beacon archives"});
  } else {
    past = verify_past(rec, archives);
    for (std::size_t i = 0; i < past.size(); ++i) {
      if (past[i].status != CheckStatus::Pass) note(i, "past", past[i].status, past[i].detail);
    }
  }

  std::vector<FutureCheck> future = verify_future(rec, logs);
  for (std::size_t i = 0; i < future.size(); ++i) {
    if (future[i].status != CheckStatus::Pass) note(i, "future", future[i].status);
  }

  // The closing digest binds the manifest's length: a shortened chain has a
  // never-published close record.
  if (!logs.empty() && !rec.chain.empty()) {
    const Digest s = prepare_submission(final_submission(rec.chain.back()).span());
    if (!majority_time(logs, s)) {
      note(rec.chain.size() - 1, "final", CheckStatus::Fail,
           "close-of-session digest not published by a majority");
    }
  } else if (logs.empty()) {
    any_degraded = true;
    report.findings.push_back(Finding{0, "future", CheckStatus::Degraded, "no repository logs"});
  }

  if (secondary_track) {
    std::vector<CheckStatus> coupling = verify_coupling(rec, *secondary_track);
    for (std::size_t i = 0; i < coupling.size(); ++i) {
      if (coupling[i] != CheckStatus::Pass && coupling[i] != CheckStatus::NotApplicable) {
        note(i, "coupling", coupling[i]);
      }
    }
  }

  for (std::size_t i = 0; i < rec.chunks.size(); ++i) {
    if (i >= past.size() || i >= future.size()) break;
    if (past[i].status != CheckStatus::Pass || future[i].status != CheckStatus::Pass) continue;
    TimeBracket bracket;
    bracket.chunk_index = i;
    bracket.t_past = past[i].t_past;
    bracket.t_future = future[i].t_future;
    bracket.width = bracket.t_future >= bracket.t_past ? bracket.t_future - bracket.t_past : 0;
    report.brackets.push_back(bracket);
  }

  report.overall = any_fail         ? OverallVerdict::Tampered
                   : any_degraded   ? OverallVerdict::Unverifiable
                                    : OverallVerdict::Authentic;
  if (report.overall != OverallVerdict::Authentic) {
    // Brackets are only claimed for a recording whose checks all hold.
    if (report.overall == OverallVerdict::Tampered) {
      std::vector<TimeBracket> kept;
      for (const TimeBracket& b : report.brackets) {
        bool tampered = false;
        for (const Finding& f : report.findings) {
          if (f.status == CheckStatus::Fail && f.chunk_index == b.chunk_index) tampered = true;
        }
        if (!tampered) kept.push_back(b);
      }
      report.brackets = std::move(kept);
    } else {
      report.brackets.clear();
    }
  }
  for (const TimeBracket& b : report.brackets) report.max_width = std::max(report.max_width, b.width);
  return report;
}

std::string report_to_json(const BracketReport& report) {
  nlohmann::json j;
  j["verdict"] = to_string(report.overall);
  j["max_width"] = report.max_width;
  j["brackets"] = nlohmann::json::array();
  for (const TimeBracket& b : report.brackets) {
    j["brackets"].push_back({{"chunk", b.chunk_index},
                             {"t_past", b.t_past},
                             {"t_future", b.t_future},
                             {"width", b.width}});
  }
  j["findings"] = nlohmann::json::array();
  for (const Finding& f : report.findings) {
    j["findings"].push_back({{"chunk", f.chunk_index},
                             {"check", f.check},
                             {"status", to_string(f.status)},
                             {"detail", f.detail}});
  }
  return j.dump(2);
}

}  // namespace tba
