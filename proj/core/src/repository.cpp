#include "tba/repository.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "tba/errors.hpp"

namespace tba {

Digest prepare_submission(std::span<const std::uint8_t> content) { return digest(content); }

HapLog::HapLog(HapId id, HapFault fault) : id_(id), fault_(fault) {}

std::optional<HapRecord> HapLog::submit(const Digest& s, Timestamp t_now) {
  if (!records_.empty() && t_now < records_.back().t) {
    throw Error("hap submission with non-monotone timestamp");
  }
  if (fault_ == HapFault::Dropper) return std::nullopt;
  HapRecord record{t_now, digest(s.span())};
  records_.push_back(record);
  return record;
}

std::optional<Timestamp> HapLog::lookup(const Digest& v) const {
  std::optional<Timestamp> earliest;
  for (const auto& r : records_) {
    if (r.v == v && (!earliest || r.t < *earliest)) earliest = r.t;
  }
  return earliest;
}

void HapLog::rewrite_record(std::size_t index, const Digest& new_v) {
  if (fault_ != HapFault::Rewriter) throw Error("only a rewriter log may mutate records");
  if (index >= records_.size()) throw Error("rewrite index out of range");
  records_[index].v = new_v;
}

void HapLog::erase_record(std::size_t index) {
  if (fault_ != HapFault::Rewriter) throw Error("only a rewriter log may erase records");
  if (index >= records_.size()) throw Error("erase index out of range");
  records_.erase(records_.begin() + static_cast<std::ptrdiff_t>(index));
}

bool verify_majority(std::span<const HapLog> logs, const Digest& s, Timestamp t_max) {
  if (logs.empty()) throw Error("majority check needs at least one log");
  const Digest v = digest(s.span());
  std::size_t holding = 0;
  for (const auto& log : logs) {
    auto t = log.lookup(v);
    if (t && *t <= t_max) ++holding;
  }
  return holding * 2 > logs.size();
}

std::optional<Timestamp> majority_time(std::span<const HapLog> logs, const Digest& s) {
  if (logs.empty()) throw Error("majority check needs at least one log");
  const Digest v = digest(s.span());
  std::vector<Timestamp> times;
  for (const auto& log : logs) {
    if (auto t = log.lookup(v)) times.push_back(*t);
  }
  const std::size_t needed = logs.size() / 2 + 1;
  if (times.size() < needed) return std::nullopt;
  std::sort(times.begin(), times.end());
  return times[needed - 1];
}

std::vector<HapRecord> divergent_records(const HapLog& log, const HapLog& mirror) {
  std::vector<HapRecord> out;
  for (const auto& r : mirror.records()) {
    if (std::find(log.records().begin(), log.records().end(), r) == log.records().end()) {
      out.push_back(r);
    }
  }
  return out;
}

void write_log_jsonl(const HapLog& log, std::ostream& out) {
  for (const auto& r : log.records()) {
    nlohmann::json line;
    line["t"] = r.t;
    line["v"] = r.v.hex();
    out << line.dump() << '\n';
  }
}

std::vector<HapRecord> read_log_jsonl(std::istream& in) {
  std::vector<HapRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    HapRecord r;
    r.t = j.at("t").get<Timestamp>();
    r.v = Digest::from_hex(j.at("v").get<std::string>());
    if (!records.empty() && r.t < records.back().t) {
      throw Error("hap log timestamps must be non-decreasing");
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace tba
