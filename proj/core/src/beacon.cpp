#include "tba/beacon.hpp"

#include <istream>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "tba/errors.hpp"

namespace tba {

TrgSource::TrgSource(bool seeded, std::array<std::uint8_t, 32> seed, std::size_t bits)
    : seeded_(seeded), seed_(seed), width_bytes_(bits / 8) {
  if (bits == 0 || bits % 8 != 0 || bits > 256) {
    throw Error("challenge width must be a multiple of 8 bits, at most 256");
  }
}

TrgSource TrgSource::os_entropy(std::size_t challenge_bits) {
  return TrgSource(false, {}, challenge_bits);
}

TrgSource TrgSource::seeded(const std::array<std::uint8_t, 32>& seed, std::size_t challenge_bits) {
  return TrgSource(true, seed, challenge_bits);
}

Bytes TrgSource::next() {
  if (seeded_) {
    Bytes input(seed_.begin(), seed_.end());
    put_u64_be(input, counter_++);
    Digest d = digest(input);
    return Bytes(d.bytes.begin(), d.bytes.begin() + width_bytes_);
  }
  try {
    std::random_device rd;
    Bytes out(width_bytes_);
    for (auto& b : out) b = static_cast<std::uint8_t>(rd() & 0xff);
    return out;
  } catch (const std::exception& e) {
    // A beacon must stall rather than emit predictable data.
    throw EntropyError(std::string("OS entropy unavailable: ") + e.what());
  }
}

TrgSource TrgSource::fork(std::string_view tag) const {
  if (!seeded_) return os_entropy(width_bytes_ * 8);
  Bytes input(seed_.begin(), seed_.end());
  input.insert(input.end(), tag.begin(), tag.end());
  Digest d = digest(input);
  return seeded(d.bytes, width_bytes_ * 8);
}

Beacon::Beacon(BeaconId id, std::uint64_t delta, TrgSource trg)
    : id_(id), delta_(delta), trg_(std::move(trg)) {
  if (delta_ == 0) throw Error("beacon delta must be at least 1 tick");
}

void Beacon::set_fault(BeaconFault kind) {
  fault_ = kind;
  if (kind == BeaconFault::Equivocator && !equivocation_trg_) {
    equivocation_trg_ = trg_.fork("equivocate");
  }
}

void Beacon::set_stall_ticks(std::set<Timestamp> ticks) { stall_ticks_ = std::move(ticks); }

std::optional<BeaconEmission> Beacon::step(Timestamp t) {
  if (last_t_ && t <= *last_t_) throw Error("beacon step with non-monotone timestamp");
  if (fault_ == BeaconFault::Staller && stall_ticks_.count(t)) {
    last_t_ = t;  // the tick passes; nothing is committed or revealed
    return std::nullopt;
  }

  Bytes fresh = trg_.next();
  if (fault_ == BeaconFault::Leaker) leaks_.emplace_back(t, fresh);

  BeaconEmission emission;
  emission.t = t;
  emission.commitment = digest(fresh);

  if (t >= delta_) {
    const Timestamp due = t - delta_;
    while (!pending_.empty() && pending_.front().first < due) pending_.pop_front();
    if (!pending_.empty() && pending_.front().first == due) {
      emission.reveal = std::move(pending_.front().second);
      pending_.pop_front();
    }
  }
  if (fault_ == BeaconFault::Equivocator && emission.reveal) {
    emission.reveal = equivocation_trg_->next();
  }

  pending_.emplace_back(t, std::move(fresh));
  archive_.push_back(emission);
  last_t_ = t;
  return emission;
}

namespace {

const BeaconEmission* find_emission(std::span<const BeaconEmission> archive, Timestamp t) {
  for (const auto& e : archive) {
    if (e.t == t) return &e;
  }
  return nullptr;
}

}  // namespace

EmissionCheck verify_emission(std::span<const BeaconEmission> archive, Timestamp t,
                              std::uint64_t delta) {
  const BeaconEmission* at_t = find_emission(archive, t);
  if (at_t == nullptr) return EmissionCheck::Gap;
  if (!at_t->reveal) {
    // Warm-up: nothing was committed delta ticks ago, so nothing to check.
    if (archive.empty() || t < archive.front().t + delta) return EmissionCheck::Pass;
    return EmissionCheck::Gap;
  }
  if (t < delta) return EmissionCheck::Fail;  // a reveal with no possible commitment
  const BeaconEmission* committed = find_emission(archive, t - delta);
  if (committed == nullptr) return EmissionCheck::Gap;
  return digest(*at_t->reveal) == committed->commitment ? EmissionCheck::Pass
                                                        : EmissionCheck::Fail;
}

void write_archive_jsonl(std::span<const BeaconEmission> archive, std::ostream& out) {
  for (const auto& e : archive) {
    nlohmann::json line;
    line["t"] = e.t;
    line["commit"] = e.commitment.hex();
    if (e.reveal) {
      line["reveal"] = to_hex(*e.reveal);
    } else {
      line["reveal"] = nullptr;
    }
    out << line.dump() << '\n';
  }
}

std::vector<BeaconEmission> read_archive_jsonl(std::istream& in) {
  std::vector<BeaconEmission> archive;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    BeaconEmission e;
    e.t = j.at("t").get<Timestamp>();
    e.commitment = Digest::from_hex(j.at("commit").get<std::string>());
    if (!j.at("reveal").is_null()) e.reveal = from_hex(j.at("reveal").get<std::string>());
    if (!archive.empty() && e.t <= archive.back().t) {
      throw Error("beacon archive timestamps must be strictly increasing");
    }
    archive.push_back(std::move(e));
  }
  return archive;
}

}  // namespace tba
