#include "tba/simnet.hpp"

#include <algorithm>
#include <cassert>
#include <map>

#include <nlohmann/json.hpp>

#include "tba/discretion.hpp"
#include "tba/errors.hpp"

namespace tba {

namespace {

std::array<std::uint8_t, 32> derive_seed(std::uint64_t scenario_seed, std::string_view role,
                                         std::uint64_t index) {
  Bytes input;
  put_u64_be(input, scenario_seed);
  input.insert(input.end(), role.begin(), role.end());
  put_u64_be(input, index);
  return digest(input).bytes;
}

std::array<std::uint8_t, 16> derive_id(std::uint64_t scenario_seed, std::string_view role,
                                       std::uint64_t index) {
  auto seed = derive_seed(scenario_seed, role, index);
  std::array<std::uint8_t, 16> id{};
  std::copy_n(seed.begin(), 16, id.begin());
  return id;
}

const char* fault_name(BeaconFault f) {
  switch (f) {
    case BeaconFault::Honest: return "honest";
    case BeaconFault::Equivocator: return "equivocator";
    case BeaconFault::Staller: return "staller";
    case BeaconFault::Leaker: return "leaker";
  }
  return "?";
}

const char* fault_name(HapFault f) {
  switch (f) {
    case HapFault::Honest: return "honest";
    case HapFault::Dropper: return "dropper";
    case HapFault::Rewriter: return "rewriter";
  }
  return "?";
}

BeaconFault beacon_fault_from(const std::string& name) {
  if (name == "honest") return BeaconFault::Honest;
  if (name == "equivocator") return BeaconFault::Equivocator;
  if (name == "staller") return BeaconFault::Staller;
  if (name == "leaker") return BeaconFault::Leaker;
  throw Error("unknown beacon fault: " + name);
}

HapFault hap_fault_from(const std::string& name) {
  if (name == "honest") return HapFault::Honest;
  if (name == "dropper") return HapFault::Dropper;
  if (name == "rewriter") return HapFault::Rewriter;
  throw Error("unknown repository fault: " + name);
}

const char* mutation_name(MutationSpec::Kind kind) {
  switch (kind) {
    case MutationSpec::Kind::None: return "none";
    case MutationSpec::Kind::FlipPayloadByte: return "flip-payload-byte";
    case MutationSpec::Kind::FlipChallengeByte: return "flip-challenge-byte";
    case MutationSpec::Kind::FlipCouplingByte: return "flip-coupling-byte";
    case MutationSpec::Kind::BumpTimestamp: return "bump-timestamp";
    case MutationSpec::Kind::SwapChunks: return "swap-chunks";
    case MutationSpec::Kind::DeleteChunk: return "delete-chunk";
  }
  return "none";
}

MutationSpec::Kind mutation_kind_from(const std::string& name) {
  if (name == "none") return MutationSpec::Kind::None;
  if (name == "flip-payload-byte") return MutationSpec::Kind::FlipPayloadByte;
  if (name == "flip-challenge-byte") return MutationSpec::Kind::FlipChallengeByte;
  if (name == "flip-coupling-byte") return MutationSpec::Kind::FlipCouplingByte;
  if (name == "bump-timestamp") return MutationSpec::Kind::BumpTimestamp;
  if (name == "swap-chunks") return MutationSpec::Kind::SwapChunks;
  if (name == "delete-chunk") return MutationSpec::Kind::DeleteChunk;
  throw Error("unknown mutation kind: " + name);
}

/// What the forger knows about beacon randomness at a given tick: leaked
/// reveals as of their commitment time, nothing else before emission.
struct AdversaryKnowledge {
  // (beacon index, commit tick) -> leaked string
  std::map<std::pair<std::size_t, Timestamp>, Bytes> leaked;

  std::optional<Bytes> reveal_for(std::size_t beacon, Timestamp commit_tick,
                                  Timestamp now) const {
    auto it = leaked.find({beacon, commit_tick});
    if (it == leaked.end()) return std::nullopt;
    assert(commit_tick <= now);  // no time travel: leaks are known from commit time on
    return it->second;
  }
};

}  // namespace

void ScenarioConfig::validate() const {
  if (beacons.empty()) throw Error("scenario needs at least one beacon");
  if (repositories.empty()) throw Error("scenario needs at least one repository");
  if (delta == 0) throw Error("delta must be at least 1");
  if (chunk_period == 0) throw Error("chunk_period must be at least 1");
  if (chunk_count == 0) throw Error("scenario needs at least one chunk");
  if (bytes_per_tick == 0) throw Error("bytes_per_tick must be positive");
}

Recording mutate_after_publication(const Recording& rec, const MutationSpec& spec) {
  Recording out = rec;
  auto check_chunk = [&](std::uint64_t c) {
    if (c >= out.chunks.size()) throw Error("mutation chunk index out of range");
  };
  switch (spec.kind) {
    case MutationSpec::Kind::None:
      break;
    case MutationSpec::Kind::FlipPayloadByte:
      check_chunk(spec.chunk);
      if (spec.offset >= out.chunks[spec.chunk].payload.size()) {
        throw Error("mutation payload offset out of range");
      }
      out.chunks[spec.chunk].payload[spec.offset] ^= 0x01;
      break;
    case MutationSpec::Kind::FlipChallengeByte:
      check_chunk(spec.chunk);
      if (spec.offset >= 32) throw Error("mutation challenge offset out of range");
      out.chunks[spec.chunk].challenge[spec.offset] ^= 0x01;
      break;
    case MutationSpec::Kind::FlipCouplingByte:
      check_chunk(spec.chunk);
      if (!out.chunks[spec.chunk].coupling_digest) throw Error("chunk has no coupling digest");
      if (spec.offset >= 32) throw Error("mutation coupling offset out of range");
      out.chunks[spec.chunk].coupling_digest->bytes[spec.offset] ^= 0x01;
      break;
    case MutationSpec::Kind::BumpTimestamp:
      check_chunk(spec.chunk);
      switch (spec.offset % 3) {
        case 0: out.chunks[spec.chunk].t_start += 1; break;
        case 1: out.chunks[spec.chunk].t_end += 1; break;
        default: out.chunks[spec.chunk].challenge_time += 1; break;
      }
      break;
    case MutationSpec::Kind::SwapChunks:
      check_chunk(spec.chunk);
      check_chunk(spec.other);
      std::swap(out.chunks[spec.chunk], out.chunks[spec.other]);
      break;
    case MutationSpec::Kind::DeleteChunk: {
      check_chunk(spec.chunk);
      const auto at = static_cast<std::ptrdiff_t>(spec.chunk);
      out.chunks.erase(out.chunks.begin() + at);
      if (spec.chunk < out.chain.size()) out.chain.erase(out.chain.begin() + at);
      if (spec.chunk < out.receipts.size()) out.receipts.erase(out.receipts.begin() + at);
      break;
    }
  }
  return out;
}

ScenarioArtifacts run_scenario_full(const ScenarioConfig& cfg) {
  cfg.validate();

  SessionConfig session;
  session.session_id = derive_id(cfg.seed, "session", 0);
  session.chunk_period = cfg.chunk_period;
  session.bytes_per_tick = cfg.bytes_per_tick;
  session.coupling_enabled = cfg.coupling;
  session.validate();

  std::vector<Beacon> beacons;
  beacons.reserve(cfg.beacons.size());
  for (std::size_t i = 0; i < cfg.beacons.size(); ++i) {
    Beacon b(derive_id(cfg.seed, "beacon", i), cfg.delta,
             TrgSource::seeded(derive_seed(cfg.seed, "beacon", i)));
    b.set_fault(cfg.beacons[i].fault);
    b.set_stall_ticks(cfg.beacons[i].stall_ticks);
    beacons.push_back(std::move(b));
  }

  std::vector<HapLog> logs;
  logs.reserve(cfg.repositories.size());
  for (std::size_t i = 0; i < cfg.repositories.size(); ++i) {
    logs.emplace_back(derive_id(cfg.seed, "hap", i), cfg.repositories[i]);
  }
  std::vector<HapLog*> log_ptrs;
  for (auto& log : logs) log_ptrs.push_back(&log);

  const Timestamp record_start = cfg.delta + 1;
  const Timestamp record_end = record_start + cfg.chunk_count * cfg.chunk_period;
  const Timestamp total_ticks = std::max(cfg.ticks, record_end + cfg.net_delay + 1);

  const bool forging = cfg.adversary == AdversaryKind::Forger;
  RecordingSession recorder(session, record_start, log_ptrs);
  SceneSource scene =
      SceneSource::seeded(derive_seed(cfg.seed, forging ? "forged-scene" : "scene", 0));
  TrgSource guess_trg = TrgSource::seeded(derive_seed(cfg.seed, "forger-guess", 0));

  std::optional<SegmentKey> segment_key;
  if (cfg.encrypted) {
    TrgSource key_trg = TrgSource::seeded(derive_seed(cfg.seed, "segment-key", 0));
    segment_key = gen_segment_key(0, key_trg);
    const std::uint64_t blocks_per_chunk = (cfg.chunk_period * cfg.bytes_per_tick + 31) / 32;
    SegmentKey key = *segment_key;
    recorder.set_payload_transform([key, blocks_per_chunk](Bytes raw, std::uint64_t index) {
      return apply_keystream(key.key, key.segment_id, as_span(raw), index * blocks_per_chunk);
    });
  }

  // Secondary modality covers the whole recording interval at the same rate.
  Bytes secondary_track;
  if (cfg.coupling) {
    SceneSource secondary = SceneSource::seeded(derive_seed(cfg.seed, "secondary", 0));
    secondary_track = secondary.read(cfg.chunk_count * cfg.chunk_period * cfg.bytes_per_tick);
  }

  ScenarioReport report;
  AdversaryKnowledge knowledge;

  auto snapshot_archives = [&]() {
    std::vector<BeaconArchive> archives;
    archives.reserve(beacons.size());
    for (const Beacon& b : beacons) {
      archives.push_back(BeaconArchive{b.id(), b.delta(), b.archive()});
    }
    return archives;
  };

  for (Timestamp t = 1; t <= total_ticks; ++t) {
    for (std::size_t i = 0; i < beacons.size(); ++i) {
      Beacon& b = beacons[i];
      auto emission = b.step(t);
      if (!emission && b.fault() == BeaconFault::Staller) {
        report.fault_events.push_back("beacon " + std::to_string(i) + " stalled at t=" +
                                      std::to_string(t));
      }
      if (b.fault() == BeaconFault::Leaker && !b.leaks().empty() &&
          b.leaks().back().first == t) {
        knowledge.leaked[{i, t}] = b.leaks().back().second;
      }
    }

    const bool chunk_start = t >= record_start && t < record_end &&
                             (t - record_start) % cfg.chunk_period == 0;
    if (!chunk_start) continue;

    const Timestamp submit_time = t + cfg.chunk_period + cfg.net_delay;
    auto archives = snapshot_archives();

    if (forging) {
      // The forger sees commitments only; a reveal enters its knowledge set
      // at its leak time, never before emission.
      Bytes value;
      for (std::size_t i = 0; i < beacons.size(); ++i) {
        Bytes part;
        if (auto leaked = knowledge.reveal_for(i, t - cfg.delta, t)) {
          part = *leaked;
        } else {
          part = guess_trg.next();
        }
        if (value.empty()) {
          value = part;
        } else {
          for (std::size_t k = 0; k < value.size(); ++k) value[k] ^= part[k];
        }
      }
      Challenge forged;
      forged.t = t;
      forged.value = std::move(value);
      for (const Beacon& b : beacons) forged.contributors.push_back(b.id());
      recorder.record_chunk(scene, forged, t, submit_time,
                            cfg.coupling ? std::span<const std::uint8_t>(
                                               secondary_track.data() +
                                                   (t - record_start) * cfg.bytes_per_tick,
                                               cfg.chunk_period * cfg.bytes_per_tick)
                                         : std::span<const std::uint8_t>{});
      continue;
    }

    std::vector<std::optional<BeaconEmission>> emissions;
    for (const auto& archive : archives) {
      const BeaconEmission* e = archive.find(t);
      emissions.emplace_back(e ? std::optional<BeaconEmission>(*e) : std::nullopt);
    }
    try {
      Challenge challenge = combine_challenge(emissions, archives, t);
      for (const auto& [id, reason] : challenge.excluded) {
        for (std::size_t i = 0; i < beacons.size(); ++i) {
          if (beacons[i].id() == id) {
            report.fault_events.push_back("beacon " + std::to_string(i) + " excluded at t=" +
                                          std::to_string(t) + " (" + to_string(reason) + ")");
          }
        }
      }
      std::span<const std::uint8_t> window;
      if (cfg.coupling) {
        window = std::span<const std::uint8_t>(
            secondary_track.data() + (t - record_start) * cfg.bytes_per_tick,
            cfg.chunk_period * cfg.bytes_per_tick);
      }
      const Chunk& chunk = recorder.record_chunk(scene, challenge, t, submit_time, window);
      for (std::size_t r = 0; r < logs.size(); ++r) {
        if (logs[r].fault() == HapFault::Dropper) {
          report.fault_events.push_back("repository " + std::to_string(r) +
                                        " dropped chunk " + std::to_string(chunk.index));
        }
      }
    } catch (const NoTrustworthyChallengeError&) {
      recorder.record_gap(t);
      report.fault_events.push_back("no trustworthy challenge at t=" + std::to_string(t) +
                                    ", chunk skipped");
    }
  }

  ScenarioArtifacts artifacts;
  artifacts.logs = std::move(logs);
  artifacts.secondary_track = std::move(secondary_track);
  artifacts.archives = snapshot_archives();

  Recording recording = recorder.finalize(record_end + cfg.net_delay);
  if (cfg.adversary == AdversaryKind::PostHocEditor) {
    MutationSpec spec = cfg.mutation;
    if (spec.kind == MutationSpec::Kind::None) {
      spec.kind = MutationSpec::Kind::FlipPayloadByte;
      spec.chunk = 0;
      spec.offset = session.marker_len + 1;
    }
    recording = mutate_after_publication(recording, spec);
  } else if (cfg.mutation.kind != MutationSpec::Kind::None) {
    recording = mutate_after_publication(recording, cfg.mutation);
  }
  artifacts.recording = std::move(recording);

  std::optional<std::span<const std::uint8_t>> secondary;
  if (cfg.coupling) secondary = as_span(artifacts.secondary_track);
  BracketReport verdict = bracket_report(artifacts.recording, artifacts.archives,
                                         artifacts.logs, secondary);

  report.verdict = to_string(verdict.overall);
  report.brackets = verdict.brackets;
  report.max_width = verdict.max_width;
  report.adversary_success = cfg.adversary != AdversaryKind::None &&
                             verdict.overall == OverallVerdict::Authentic;
  artifacts.report = std::move(report);
  return artifacts;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) { return run_scenario_full(cfg).report; }

std::string scenario_config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["ticks"] = cfg.ticks;
  j["delta"] = cfg.delta;
  j["chunk_period"] = cfg.chunk_period;
  j["chunk_count"] = cfg.chunk_count;
  j["net_delay"] = cfg.net_delay;
  j["bytes_per_tick"] = cfg.bytes_per_tick;
  j["coupling"] = cfg.coupling;
  j["encrypted"] = cfg.encrypted;
  j["beacons"] = nlohmann::json::array();
  for (const BeaconSpec& b : cfg.beacons) {
    nlohmann::json bj;
    bj["fault"] = fault_name(b.fault);
    bj["stall_ticks"] = b.stall_ticks;
    j["beacons"].push_back(std::move(bj));
  }
  j["repositories"] = nlohmann::json::array();
  for (HapFault f : cfg.repositories) j["repositories"].push_back(fault_name(f));
  switch (cfg.adversary) {
    case AdversaryKind::None: j["adversary"] = "none"; break;
    case AdversaryKind::Forger: j["adversary"] = "forger"; break;
    case AdversaryKind::PostHocEditor: j["adversary"] = "post-hoc-editor"; break;
  }
  j["mutation"] = {{"kind", mutation_name(cfg.mutation.kind)},
                   {"chunk", cfg.mutation.chunk},
                   {"offset", cfg.mutation.offset},
                   {"other", cfg.mutation.other}};
  return j.dump(2);
}

ScenarioConfig scenario_config_from_json(std::string_view json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  ScenarioConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.ticks = j.value("ticks", cfg.ticks);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.chunk_period = j.value("chunk_period", cfg.chunk_period);
  cfg.chunk_count = j.value("chunk_count", cfg.chunk_count);
  cfg.net_delay = j.value("net_delay", cfg.net_delay);
  cfg.bytes_per_tick = j.value("bytes_per_tick", cfg.bytes_per_tick);
  cfg.coupling = j.value("coupling", cfg.coupling);
  cfg.encrypted = j.value("encrypted", cfg.encrypted);
  if (j.contains("beacons")) {
    cfg.beacons.clear();
    for (const auto& bj : j.at("beacons")) {
      BeaconSpec spec;
      spec.fault = beacon_fault_from(bj.value("fault", std::string("honest")));
      if (bj.contains("stall_ticks")) {
        for (Timestamp t : bj.at("stall_ticks").get<std::vector<Timestamp>>()) {
          spec.stall_ticks.insert(t);
        }
      }
      cfg.beacons.push_back(std::move(spec));
    }
  }
  if (j.contains("repositories")) {
    cfg.repositories.clear();
    for (const auto& rj : j.at("repositories")) {
      cfg.repositories.push_back(hap_fault_from(rj.get<std::string>()));
    }
  }
  const std::string adversary = j.value("adversary", std::string("none"));
  if (adversary == "none") {
    cfg.adversary = AdversaryKind::None;
  } else if (adversary == "forger") {
    cfg.adversary = AdversaryKind::Forger;
  } else if (adversary == "post-hoc-editor") {
    cfg.adversary = AdversaryKind::PostHocEditor;
  } else {
    throw Error("unknown adversary kind: " + adversary);
  }
  if (j.contains("mutation")) {
    const auto& mj = j.at("mutation");
    cfg.mutation.kind = mutation_kind_from(mj.value("kind", std::string("none")));
    cfg.mutation.chunk = mj.value("chunk", std::uint64_t{0});
    cfg.mutation.offset = mj.value("offset", std::uint64_t{0});
    cfg.mutation.other = mj.value("other", std::uint64_t{0});
  }
  return cfg;
}

std::string scenario_report_to_json(const ScenarioReport& report) {
  nlohmann::json j;
  j["verdict"] = report.verdict;
  j["max_width"] = report.max_width;
  j["brackets"] = nlohmann::json::array();
  for (const TimeBracket& b : report.brackets) {
    j["brackets"].push_back({{"chunk", b.chunk_index},
                             {"t_past", b.t_past},
                             {"t_future", b.t_future},
                             {"width", b.width}});
  }
  j["fault_events"] = report.fault_events;
  j["adversary_success"] = report.adversary_success;
  return j.dump(2);
}

}  // namespace tba
