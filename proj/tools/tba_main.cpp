// tba — time-bracketed authentication toolkit.
//
// Subcommands: beacon, record, verify, sim, seal, open, lite-hash, hap.
// Exit codes: 0 success/authentic, 1 tampered or failed open, 2 unverifiable,
// 64 usage error, 66 unreadable input.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tba/beacon.hpp"
#include "tba/combiner.hpp"
#include "tba/discretion.hpp"
#include "tba/errors.hpp"
#include "tba/manifest.hpp"
#include "tba/recorder.hpp"
#include "tba/repository.hpp"
#include "tba/service.hpp"
#include "tba/simnet.hpp"
#include "tba/verifier.hpp"

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

using tba::Bytes;
using tba::Timestamp;

std::array<std::uint8_t, 32> seed_bytes(std::uint64_t seed) {
  Bytes input;
  tba::put_u64_be(input, seed);
  return tba::digest(input).bytes;
}

std::array<std::uint8_t, 16> id16(std::string_view name) {
  auto d = tba::digest(tba::as_span(name));
  std::array<std::uint8_t, 16> id{};
  std::copy_n(d.bytes.begin(), 16, id.begin());
  return id;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<tba::BeaconArchive> load_archives(const std::vector<std::string>& paths,
                                              std::uint64_t delta) {
  std::vector<tba::BeaconArchive> archives;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::ifstream in(paths[i]);
    if (!in) continue;  // absent archives degrade, they do not forge
    tba::BeaconArchive a;
    a.id = id16(paths[i]);
    a.delta = delta;
    a.emissions = tba::read_archive_jsonl(in);
    archives.push_back(std::move(a));
  }
  return archives;
}

std::vector<tba::HapLog> load_logs(const std::vector<std::string>& paths) {
  std::vector<tba::HapLog> logs;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) continue;
    tba::HapLog log(id16(path));
    log.set_records(tba::read_log_jsonl(in));
    logs.push_back(std::move(log));
  }
  return logs;
}

nlohmann::json access_record_json(const tba::AccessRecord& record) {
  nlohmann::json j;
  j["segment"] = record.segment_id;
  j["t_start"] = record.t_start;
  j["t_end"] = record.t_end;
  j["participants"] = nlohmann::json::array();
  for (const auto& p : record.participants) j["participants"].push_back(tba::to_hex(p));
  j["checksum"] = record.checksum.hex();
  j["escrow"] = tba::to_hex(record.escrow);
  return j;
}

tba::AccessRecord access_record_from_json(const nlohmann::json& j) {
  tba::AccessRecord record;
  record.segment_id = j.at("segment").get<std::uint64_t>();
  record.t_start = j.at("t_start").get<Timestamp>();
  record.t_end = j.at("t_end").get<Timestamp>();
  for (const auto& pj : j.at("participants")) {
    Bytes raw = tba::from_hex(pj.get<std::string>());
    tba::ParticipantId pid{};
    std::copy_n(raw.begin(), 16, pid.begin());
    record.participants.push_back(pid);
  }
  record.checksum = tba::Digest::from_hex(j.at("checksum").get<std::string>());
  Bytes escrow = tba::from_hex(j.at("escrow").get<std::string>());
  std::copy_n(escrow.begin(), 32, record.escrow.begin());
  return record;
}

int cmd_beacon(std::uint64_t ticks, std::uint64_t delta, std::optional<std::uint64_t> seed,
               const std::string& out, const std::string& fault,
               const std::vector<Timestamp>& stall, int serve_port) {
  tba::TrgSource trg = seed ? tba::TrgSource::seeded(seed_bytes(*seed))
                            : tba::TrgSource::os_entropy();
  tba::Beacon beacon(id16(out), delta, std::move(trg));
  if (fault == "equivocator") beacon.set_fault(tba::BeaconFault::Equivocator);
  if (fault == "leaker") beacon.set_fault(tba::BeaconFault::Leaker);
  if (fault == "staller") {
    beacon.set_fault(tba::BeaconFault::Staller);
    beacon.set_stall_ticks({stall.begin(), stall.end()});
  }
  for (Timestamp t = 1; t <= ticks; ++t) beacon.step(t);

  std::ofstream file(out);
  if (!file) {
    std::cerr << "cannot write " << out << "\n";
    return kExitNoInput;
  }
  tba::write_archive_jsonl(beacon.archive(), file);
  file.close();

  if (serve_port > 0) {
    httplib::Server server;
    tba::attach_beacon_routes(server, beacon.archive());
    std::cerr << "beacon archive on port " << serve_port << "\n";
    server.listen("0.0.0.0", serve_port);
  }
  return 0;
}

int cmd_record(const std::string& scene_path, std::optional<std::uint64_t> scene_seed,
               const std::vector<std::string>& archive_paths, std::uint64_t delta,
               const std::string& manifest_path, const std::vector<std::string>& log_paths,
               std::uint64_t period, std::uint64_t chunks, std::optional<Timestamp> start_opt,
               std::uint64_t net_delay, std::uint64_t bytes_per_tick,
               const std::string& secondary_path) {
  auto archives = load_archives(archive_paths, delta);
  if (archives.size() != archive_paths.size()) {
    std::cerr << "missing beacon archive\n";
    return kExitNoInput;
  }

  std::vector<tba::HapLog> logs;
  for (const auto& path : log_paths) logs.emplace_back(id16(path));
  std::vector<tba::HapLog*> log_ptrs;
  for (auto& log : logs) log_ptrs.push_back(&log);

  tba::SessionConfig cfg;
  cfg.session_id = id16(manifest_path);
  cfg.chunk_period = period;
  cfg.bytes_per_tick = bytes_per_tick;

  std::optional<std::string> secondary;
  if (!secondary_path.empty()) {
    secondary = read_file(secondary_path);
    if (!secondary) {
      std::cerr << "cannot read " << secondary_path << "\n";
      return kExitNoInput;
    }
    cfg.coupling_enabled = true;
  }

  const Timestamp start = start_opt ? *start_opt : delta + 1;
  tba::RecordingSession session(cfg, start, log_ptrs);
  tba::SceneSource scene = scene_seed ? tba::SceneSource::seeded(seed_bytes(*scene_seed))
                                      : tba::SceneSource::from_file(scene_path);

  for (std::uint64_t i = 0; i < chunks; ++i) {
    const Timestamp t = start + i * period;
    std::span<const std::uint8_t> window;
    if (secondary) {
      const std::size_t offset = (t - start) * bytes_per_tick;
      const std::size_t len = period * bytes_per_tick;
      if (offset + len > secondary->size()) {
        std::cerr << "secondary track shorter than the recording\n";
        return kExitNoInput;
      }
      window = tba::as_span(*secondary).subspan(offset, len);
    }
    try {
      tba::Challenge challenge = tba::challenge_of_record(archives, t);
      session.record_chunk(scene, challenge, t, t + period + net_delay, window);
    } catch (const tba::NoTrustworthyChallengeError& e) {
      std::cerr << "tick " << t << ": " << e.what() << " (gap)\n";
      session.record_gap(t);
    }
  }

  tba::Recording rec = session.finalize(start + chunks * period + net_delay);
  tba::save_manifest(rec, manifest_path);
  for (std::size_t i = 0; i < logs.size(); ++i) {
    std::ofstream out(log_paths[i]);
    tba::write_log_jsonl(logs[i], out);
  }
  return 0;
}

int cmd_verify(const std::string& manifest_path, const std::vector<std::string>& archive_paths,
               std::uint64_t delta, const std::vector<std::string>& log_paths,
               const std::string& secondary_path) {
  auto manifest_text = read_file(manifest_path);
  if (!manifest_text) {
    std::cerr << "cannot read " << manifest_path << "\n";
    return kExitNoInput;
  }
  tba::Recording rec = tba::manifest_from_json(*manifest_text);
  auto archives = load_archives(archive_paths, delta);
  auto logs = load_logs(log_paths);

  std::optional<std::string> secondary;
  std::optional<std::span<const std::uint8_t>> secondary_span;
  if (!secondary_path.empty()) {
    secondary = read_file(secondary_path);
    if (!secondary) {
      std::cerr << "cannot read " << secondary_path << "\n";
      return kExitNoInput;
    }
    secondary_span = tba::as_span(*secondary);
  }

  tba::BracketReport report = tba::bracket_report(rec, archives, logs, secondary_span);
  std::cout << tba::report_to_json(report) << "\n";
  return tba::exit_code(report.overall);
}

int cmd_sim(const std::string& config_path, const std::string& report_path) {
  auto text = read_file(config_path);
  if (!text) {
    std::cerr << "cannot read " << config_path << "\n";
    return kExitNoInput;
  }
  tba::ScenarioConfig cfg = tba::scenario_config_from_json(*text);
  tba::ScenarioReport report = tba::run_scenario(cfg);
  const std::string out = tba::scenario_report_to_json(report);
  if (!report_path.empty()) {
    std::ofstream file(report_path);
    if (!file) {
      std::cerr << "cannot write " << report_path << "\n";
      return kExitNoInput;
    }
    file << out << "\n";
  }
  std::cout << out << "\n";
  return 0;
}

int cmd_seal(const std::string& in_path, std::uint64_t segment,
             const std::vector<std::string>& participants, std::optional<std::uint64_t> seed,
             const std::string& court_key_hex, Timestamp t_start, Timestamp t_end,
             const std::string& out_prefix) {
  auto plaintext = read_file(in_path);
  if (!plaintext) {
    std::cerr << "cannot read " << in_path << "\n";
    return kExitNoInput;
  }
  tba::TrgSource entropy = seed ? tba::TrgSource::seeded(seed_bytes(*seed))
                                : tba::TrgSource::os_entropy();
  tba::SegmentKey key = tba::gen_segment_key(segment, entropy);

  tba::AccessRecord record;
  record.segment_id = segment;
  record.t_start = t_start;
  record.t_end = t_end;
  for (const auto& name : participants) record.participants.push_back(id16(name));
  record.checksum = key.checksum;
  if (!court_key_hex.empty()) {
    Bytes ck = tba::from_hex(court_key_hex);
    if (ck.size() != 32) {
      std::cerr << "court key must be 64 hex characters\n";
      return kExitUsage;
    }
    std::array<std::uint8_t, 32> court_key{};
    std::copy(ck.begin(), ck.end(), court_key.begin());
    record.escrow = tba::court_escrow(key, court_key);
  }

  Bytes ciphertext = tba::apply_keystream(key.key, segment, tba::as_span(*plaintext));
  {
    std::ofstream out(out_prefix + ".enc", std::ios::binary);
    out.write(reinterpret_cast<const char*>(ciphertext.data()),
              static_cast<std::streamsize>(ciphertext.size()));
  }
  {
    std::ofstream out(out_prefix + ".access.json");
    out << access_record_json(record).dump(2) << "\n";
  }
  auto shares = tba::split_key(key, record.participants, entropy);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    std::ofstream out(out_prefix + ".share-" + participants[i] + ".json");
    out << tba::share_to_json(shares[i]) << "\n";
  }
  return 0;
}

int cmd_open(const std::string& in_path, const std::string& access_path,
             const std::vector<std::string>& share_paths, const std::string& court_key_hex,
             const std::string& out_path) {
  auto ciphertext = read_file(in_path);
  auto access_text = read_file(access_path);
  if (!ciphertext || !access_text) {
    std::cerr << "cannot read inputs\n";
    return kExitNoInput;
  }
  tba::AccessRecord record = access_record_from_json(nlohmann::json::parse(*access_text));

  tba::SegmentKey key;
  try {
    if (!court_key_hex.empty()) {
      Bytes ck = tba::from_hex(court_key_hex);
      std::array<std::uint8_t, 32> court_key{};
      std::copy(ck.begin(), ck.end(), court_key.begin());
      key = tba::court_open(record.escrow, record.segment_id, court_key, record.checksum);
    } else {
      std::vector<tba::Share> shares;
      for (const auto& path : share_paths) {
        auto text = read_file(path);
        if (!text) {
          std::cerr << "cannot read " << path << "\n";
          return kExitNoInput;
        }
        shares.push_back(tba::share_from_json(*text));
      }
      key = tba::reconstruct_key(shares, record);
    }
  } catch (const tba::ShareError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  Bytes plaintext =
      tba::apply_keystream(key.key, record.segment_id, tba::as_span(*ciphertext));
  std::ofstream out(out_path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(plaintext.data()),
            static_cast<std::streamsize>(plaintext.size()));
  return 0;
}

int cmd_lite_hash(const std::string& path) {
  auto content = read_file(path);
  if (!content) {
    std::cerr << "cannot read " << path << "\n";
    return kExitNoInput;
  }
  std::cout << tba::truncate_hex64(tba::digest(tba::as_span(*content))) << "\n";
  return 0;
}

int cmd_hap(const std::string& log_path, int port) {
  tba::HapLog log(id16(log_path));
  if (auto existing = read_file(log_path)) {
    std::istringstream in(*existing);
    log.set_records(tba::read_log_jsonl(in));
  }
  httplib::Server server;
  tba::HapService service(log);
  service.attach(server);
  server.Post("/persist", [&](const httplib::Request&, httplib::Response& res) {
    std::ofstream out(log_path);
    tba::write_log_jsonl(log, out);
    res.status = 204;
  });
  std::cerr << "hap service on port " << port << "\n";
  server.listen("0.0.0.0", port);
  std::ofstream out(log_path);
  tba::write_log_jsonl(log, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-bracketed authentication toolkit"};
  app.require_subcommand(1);

  // beacon
  auto* beacon = app.add_subcommand("beacon", "run a precommitting random beacon");
  std::uint64_t ticks = 10, delta = 3;
  std::optional<std::uint64_t> seed;
  std::string out_path, fault = "honest";
  std::vector<Timestamp> stall;
  int serve_port = 0;
  beacon->add_option("--ticks", ticks, "ticks to run");
  beacon->add_option("--delta", delta, "reveal delay in ticks");
  beacon->add_option("--seed", seed, "deterministic seed (test mode; a seeded beacon is dishonest)");
  beacon->add_option("--out", out_path, "archive output path (JSON Lines)")->required();
  beacon->add_option("--fault", fault, "honest|equivocator|staller|leaker")
      ->check(CLI::IsMember({"honest", "equivocator", "staller", "leaker"}));
  beacon->add_option("--stall", stall, "ticks a staller skips");
  beacon->add_option("--serve", serve_port, "serve the archive over HTTP on this port");

  // record
  auto* record = app.add_subcommand("record", "record a challenge-bound session");
  std::string scene_path;
  std::optional<std::uint64_t> scene_seed;
  std::vector<std::string> archive_paths, log_paths;
  std::string manifest_path, secondary_path;
  std::uint64_t period = 5, chunks = 10, net_delay = 1, bytes_per_tick = 32;
  std::optional<Timestamp> start;
  record->add_option("--scene", scene_path, "scene bytes file");
  record->add_option("--scene-seed", scene_seed, "synthetic scene seed");
  record->add_option("--archive", archive_paths, "beacon archive (repeatable)")->required();
  record->add_option("--delta", delta, "beacon reveal delay");
  record->add_option("--manifest", manifest_path, "manifest output path")->required();
  record->add_option("--log", log_paths, "repository log output path (repeatable)")->required();
  record->add_option("--period", period, "ticks per chunk");
  record->add_option("--chunks", chunks, "chunk count");
  record->add_option("--start", start, "first chunk start tick (default delta+1)");
  record->add_option("--net-delay", net_delay, "ticks per message to a repository");
  record->add_option("--bytes-per-tick", bytes_per_tick, "scene bytes per tick");
  record->add_option("--secondary", secondary_path, "secondary modality track to couple");

  // verify
  auto* verify = app.add_subcommand("verify", "verify a recording and report time brackets");
  verify->add_option("--manifest", manifest_path, "manifest path")->required();
  verify->add_option("--archive", archive_paths, "beacon archive (repeatable)");
  verify->add_option("--delta", delta, "beacon reveal delay");
  verify->add_option("--log", log_paths, "repository log (repeatable)");
  verify->add_option("--secondary", secondary_path, "secondary modality track");

  // sim
  auto* sim = app.add_subcommand("sim", "run a deterministic scenario");
  std::string config_path, report_path;
  sim->add_option("--config", config_path, "scenario config JSON")->required();
  sim->add_option("--report", report_path, "report output path");

  // seal
  auto* seal = app.add_subcommand("seal", "encrypt a segment and split its key");
  std::string in_path, out_prefix, court_key_hex;
  std::uint64_t segment = 0;
  std::vector<std::string> participants;
  Timestamp t_start = 0, t_end = 0;
  seal->add_option("--in", in_path, "plaintext file")->required();
  seal->add_option("--segment", segment, "segment id");
  seal->add_option("--participant", participants, "participant name (repeatable)")->required();
  seal->add_option("--seed", seed, "deterministic entropy seed (test mode)");
  seal->add_option("--court-key", court_key_hex, "64-hex court override key");
  seal->add_option("--t-start", t_start, "segment start");
  seal->add_option("--t-end", t_end, "segment end");
  seal->add_option("--out-prefix", out_prefix, "output path prefix")->required();

  // open
  auto* open = app.add_subcommand("open", "reconstruct a key and decrypt a segment");
  std::string access_path, open_out;
  std::vector<std::string> share_paths;
  open->add_option("--in", in_path, "ciphertext file")->required();
  open->add_option("--access", access_path, "access record JSON")->required();
  open->add_option("--share", share_paths, "share file (repeatable)");
  open->add_option("--court-key", court_key_hex, "64-hex court override key");
  open->add_option("--out", open_out, "plaintext output path")->required();

  // lite-hash
  auto* lite = app.add_subcommand("lite-hash", "print the 64-bit truncated hash of a file");
  std::string lite_path;
  lite->add_option("file", lite_path, "input file")->required();

  // hap
  auto* hap = app.add_subcommand("hap", "serve a hash-and-publish log over HTTP");
  std::string hap_log_path;
  int hap_port = 0;
  hap->add_option("--log", hap_log_path, "log file (JSON Lines)")->required();
  hap->add_option("--port", hap_port, "listen port")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*beacon) return cmd_beacon(ticks, delta, seed, out_path, fault, stall, serve_port);
    if (*record) {
      return cmd_record(scene_path, scene_seed, archive_paths, delta, manifest_path, log_paths,
                        period, chunks, start, net_delay, bytes_per_tick, secondary_path);
    }
    if (*verify) {
      return cmd_verify(manifest_path, archive_paths, delta, log_paths, secondary_path);
    }
    if (*sim) return cmd_sim(config_path, report_path);
    if (*seal) {
      return cmd_seal(in_path, segment, participants, seed, court_key_hex, t_start, t_end,
                      out_prefix);
    }
    if (*open) return cmd_open(in_path, access_path, share_paths, court_key_hex, open_out);
    if (*lite) return cmd_lite_hash(lite_path);
    if (*hap) return cmd_hap(hap_log_path, hap_port);
  } catch (const tba::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
