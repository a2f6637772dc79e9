#include "tba/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tba/errors.hpp"

namespace tba {

namespace {

using nlohmann::json;

json receipt_to_json(const Receipt& r) {
  json j;
  j["hap"] = to_hex(r.hap_id);
  if (r.record) {
    j["t"] = r.record->t;
    j["v"] = r.record->v.hex();
  } else {
    j["t"] = nullptr;
    j["v"] = nullptr;
  }
  return j;
}

Receipt receipt_from_json(const json& j) {
  Receipt r;
  Bytes id = from_hex(j.at("hap").get<std::string>());
  if (id.size() != 16) throw Error("hap id must be 16 bytes");
  std::copy(id.begin(), id.end(), r.hap_id.begin());
  if (!j.at("t").is_null()) {
    r.record = HapRecord{j.at("t").get<Timestamp>(), Digest::from_hex(j.at("v").get<std::string>())};
  }
  return r;
}

}  // namespace

std::string manifest_to_json(const Recording& rec) {
  json j;
  json header;
  header["session_id"] = to_hex(rec.config.session_id);
  header["start_time"] = rec.start_time;
  header["chunk_period"] = rec.config.chunk_period;
  header["marker_stride"] = rec.config.marker_stride;
  header["marker_len"] = rec.config.marker_len;
  header["bytes_per_tick"] = rec.config.bytes_per_tick;
  header["coupling_enabled"] = rec.config.coupling_enabled;
  j["header"] = header;

  j["chunks"] = json::array();
  for (const Chunk& c : rec.chunks) {
    json cj;
    cj["index"] = c.index;
    cj["t_start"] = c.t_start;
    cj["t_end"] = c.t_end;
    cj["challenge_time"] = c.challenge_time;
    cj["challenge"] = to_hex(c.challenge);
    if (c.coupling_digest) {
      cj["coupling"] = c.coupling_digest->hex();
    } else {
      cj["coupling"] = nullptr;
    }
    cj["payload"] = base64_encode(as_span(c.payload));
    j["chunks"].push_back(std::move(cj));
  }

  j["chain"] = json::array();
  for (const ChainHead& h : rec.chain) j["chain"].push_back(h.digest.hex());

  j["receipts"] = json::array();
  for (const auto& per_chunk : rec.receipts) {
    json row = json::array();
    for (const Receipt& r : per_chunk) row.push_back(receipt_to_json(r));
    j["receipts"].push_back(std::move(row));
  }

  j["final_receipts"] = json::array();
  for (const Receipt& r : rec.final_receipts) j["final_receipts"].push_back(receipt_to_json(r));

  j["gaps"] = rec.gaps;
  return j.dump(2);
}

Recording manifest_from_json(std::string_view json_text) {
  json j = json::parse(json_text);
  Recording rec;
  const json& header = j.at("header");
  Bytes sid = from_hex(header.at("session_id").get<std::string>());
  if (sid.size() != 16) throw Error("session id must be 16 bytes");
  std::copy(sid.begin(), sid.end(), rec.config.session_id.begin());
  rec.start_time = header.at("start_time").get<Timestamp>();
  rec.config.chunk_period = header.at("chunk_period").get<std::uint64_t>();
  rec.config.marker_stride = header.at("marker_stride").get<std::uint32_t>();
  rec.config.marker_len = header.at("marker_len").get<std::uint32_t>();
  rec.config.bytes_per_tick = header.at("bytes_per_tick").get<std::uint64_t>();
  rec.config.coupling_enabled = header.at("coupling_enabled").get<bool>();

  for (const json& cj : j.at("chunks")) {
    Chunk c;
    c.index = cj.at("index").get<std::uint64_t>();
    c.session_id = rec.config.session_id;
    c.t_start = cj.at("t_start").get<Timestamp>();
    c.t_end = cj.at("t_end").get<Timestamp>();
    c.challenge_time = cj.at("challenge_time").get<Timestamp>();
    Bytes ch = from_hex(cj.at("challenge").get<std::string>());
    if (ch.size() != 32) throw Error("challenge must be 32 bytes");
    std::copy(ch.begin(), ch.end(), c.challenge.begin());
    if (!cj.at("coupling").is_null()) {
      c.coupling_digest = Digest::from_hex(cj.at("coupling").get<std::string>());
    }
    c.payload = base64_decode(cj.at("payload").get<std::string>());
    rec.chunks.push_back(std::move(c));
  }

  std::uint64_t index = 0;
  for (const json& hj : j.at("chain")) {
    rec.chain.push_back(ChainHead{++index, Digest::from_hex(hj.get<std::string>())});
  }

  for (const json& row : j.at("receipts")) {
    std::vector<Receipt> per_chunk;
    for (const json& rj : row) per_chunk.push_back(receipt_from_json(rj));
    rec.receipts.push_back(std::move(per_chunk));
  }
  for (const json& rj : j.at("final_receipts")) {
    rec.final_receipts.push_back(receipt_from_json(rj));
  }
  rec.gaps = j.at("gaps").get<std::vector<Timestamp>>();
  return rec;
}

void save_manifest(const Recording& rec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write manifest: " + path.string());
  out << manifest_to_json(rec) << '\n';
}

Recording load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read manifest: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_json(buf.str());
}

}  // namespace tba
