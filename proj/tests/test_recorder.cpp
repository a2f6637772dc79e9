#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tba/errors.hpp"
#include "tba/manifest.hpp"
#include "tba/recorder.hpp"

using namespace tba;

namespace {

SessionConfig toy_config() {
  SessionConfig cfg;
  cfg.session_id.fill(0x42);
  cfg.chunk_period = 5;
  cfg.marker_stride = 64;
  cfg.marker_len = 8;
  cfg.bytes_per_tick = 32;
  return cfg;
}

Challenge toy_challenge(Timestamp t, std::uint8_t tag) {
  Challenge c;
  c.t = t;
  c.value.assign(32, tag);
  return c;
}

struct Rig {
  std::vector<HapLog> logs;
  std::vector<HapLog*> ptrs;

  explicit Rig(std::size_t n) {
    logs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      HapId id{};
      id.fill(static_cast<std::uint8_t>(i + 1));
      logs.emplace_back(id);
      ptrs.push_back(&logs.back());
    }
  }
};

Recording toy_recording(std::size_t chunks = 3) {
  Rig rig(3);
  RecordingSession session(toy_config(), 10, rig.ptrs);
  SceneSource scene = SceneSource::seeded({{3}});
  for (std::size_t i = 0; i < chunks; ++i) {
    Timestamp t = 10 + 5 * i;
    session.record_chunk(scene, toy_challenge(t, static_cast<std::uint8_t>(i + 1)), t, t + 6);
  }
  return session.finalize(10 + 5 * chunks + 6);
}

}  // namespace

TEST_CASE("marker bytes derive from challenge, chunk index, and slot") {
  std::array<std::uint8_t, 32> ch{};
  ch.fill(0x11);
  Bytes m = marker_bytes(ch, 4, 2, 8);
  CHECK(m.size() == 8);

  Bytes preimage(ch.begin(), ch.end());
  put_u64_be(preimage, 4);
  put_u64_be(preimage, 2);
  Digest d = digest(preimage);
  CHECK(Bytes(d.bytes.begin(), d.bytes.begin() + 8) == m);

  CHECK(marker_bytes(ch, 4, 3, 8) != m);
  CHECK(marker_bytes(ch, 5, 2, 8) != m);
}

TEST_CASE("bind_challenge places markers at every stride that fits") {
  SessionConfig cfg = toy_config();
  std::array<std::uint8_t, 32> ch{};
  ch.fill(0x22);
  Bytes payload(200, 0xee);
  BindResult r = bind_challenge(payload, ch, 7, cfg);
  CHECK_FALSE(r.degenerate);
  CHECK(r.payload.size() == 200);

  // slots at offsets 0, 64, 128; 192+8 <= 200 so slot 3 fits too
  for (std::uint64_t j = 0; j <= 3; ++j) {
    Bytes expect = marker_bytes(ch, 7, j, 8);
    Bytes got(r.payload.begin() + j * 64, r.payload.begin() + j * 64 + 8);
    CHECK(got == expect);
  }
  // bytes between markers are untouched
  for (std::size_t off : {8u, 63u, 72u, 127u, 136u, 191u}) CHECK(r.payload[off] == 0xee);

  SUBCASE("too-short payload is degenerate and unmodified") {
    BindResult tiny = bind_challenge(Bytes(7, 0xee), ch, 7, cfg);
    CHECK(tiny.degenerate);
    CHECK(tiny.payload == Bytes(7, 0xee));
  }
}

TEST_CASE("seeded scene source is deterministic, file source is exact") {
  SceneSource a = SceneSource::seeded({{9}});
  SceneSource b = SceneSource::seeded({{9}});
  CHECK(a.read(100) == b.read(100));
  CHECK(a.read(10) == b.read(10));

  auto path = std::filesystem::temp_directory_path() / "tba_scene_test.bin";
  {
    std::ofstream f(path, std::ios::binary);
    f << "0123456789";
  }
  SceneSource file = SceneSource::from_file(path);
  CHECK(file.read(4) == Bytes{'0', '1', '2', '3'});
  CHECK(file.read(6) == Bytes{'4', '5', '6', '7', '8', '9'});
  CHECK_THROWS_AS(file.read(1), Error);
  std::filesystem::remove(path);
}

TEST_CASE("session config validation") {
  SessionConfig cfg = toy_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.chunk_period = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = toy_config();
  cfg.marker_len = 33;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = toy_config();
  cfg.marker_stride = 4;  // stride smaller than marker
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = toy_config();
  cfg.bytes_per_tick = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("a session chains chunks and exports digests to every repository") {
  Rig rig(3);
  RecordingSession session(toy_config(), 10, rig.ptrs);
  SceneSource scene = SceneSource::seeded({{3}});

  session.record_chunk(scene, toy_challenge(10, 1), 10, 16);
  session.record_chunk(scene, toy_challenge(16, 2), 15, 21);
  Recording rec = session.finalize(22);

  REQUIRE(rec.chunks.size() == 2);
  CHECK(rec.chunks[0].t_start == 10);
  CHECK(rec.chunks[0].t_end == 15);
  CHECK(rec.chunks[0].payload.size() == 5 * 32);
  CHECK(rec.chunks[1].challenge_time == 16);

  // chain recomputes from the header
  REQUIRE(rec.chain.size() == 2);
  ChainHead head = rec.header_head();
  CHECK(head.index == 0);
  head = chain_extend(head, canonical_chunk_bytes(rec.chunks[0]));
  CHECK(head == rec.chain[0]);
  head = chain_extend(head, canonical_chunk_bytes(rec.chunks[1]));
  CHECK(head == rec.chain[1]);

  // every log holds every per-chunk digest plus the closing digest
  REQUIRE(rec.receipts.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    REQUIRE(rec.receipts[i].size() == 3);
    for (const HapLog& log : rig.logs) {
      // published value = h(s) for the client-side pre-hash s = h(chain digest)
      Digest s = prepare_submission(chunk_submission(rec.chain[i]).span());
      Digest v = digest(s.span());
      REQUIRE(log.lookup(v).has_value());
      CHECK(*log.lookup(v) == rec.receipts[i][0].record->t);
    }
  }
  for (const HapLog& log : rig.logs) {
    Digest s = prepare_submission(final_submission(rec.chain.back()).span());
    CHECK(log.lookup(digest(s.span())) == 22);
  }
  REQUIRE(rec.final_receipts.size() == 3);
}

TEST_CASE("record_chunk enforces challenge shape and timing") {
  Rig rig(1);
  RecordingSession session(toy_config(), 10, rig.ptrs);
  SceneSource scene = SceneSource::seeded({{4}});

  Challenge narrow = toy_challenge(10, 1);
  narrow.value.resize(16);
  CHECK_THROWS_AS(session.record_chunk(scene, narrow, 10, 16), Error);

  // challenge revealed before the chunk interval: stale, refused
  CHECK_THROWS_AS(session.record_chunk(scene, toy_challenge(9, 1), 10, 16), Error);
  // or after the interval ends
  CHECK_THROWS_AS(session.record_chunk(scene, toy_challenge(16, 1), 10, 16), Error);
  CHECK_NOTHROW(session.record_chunk(scene, toy_challenge(15, 1), 10, 16));
}

TEST_CASE("gaps are recorded, not papered over") {
  Rig rig(1);
  RecordingSession session(toy_config(), 10, rig.ptrs);
  SceneSource scene = SceneSource::seeded({{5}});
  session.record_chunk(scene, toy_challenge(10, 1), 10, 16);
  session.record_gap(15);
  session.record_chunk(scene, toy_challenge(20, 2), 20, 26);
  Recording rec = session.finalize(27);
  CHECK(rec.gaps == std::vector<Timestamp>{15});
  CHECK(rec.chunks.size() == 2);
  CHECK(rec.chunks[1].index == 1);
}

TEST_CASE("payload transform runs before challenge binding") {
  Rig rig(1);
  RecordingSession session(toy_config(), 10, rig.ptrs);
  session.set_payload_transform([](Bytes raw, std::uint64_t) {
    for (auto& b : raw) b ^= 0x5a;
    return raw;
  });
  SceneSource scene = SceneSource::seeded({{6}});
  session.record_chunk(scene, toy_challenge(10, 1), 10, 16);
  Recording rec = session.finalize(17);

  SceneSource replay = SceneSource::seeded({{6}});
  Bytes raw = replay.read(5 * 32);
  for (auto& b : raw) b ^= 0x5a;
  std::array<std::uint8_t, 32> ch{};
  std::copy_n(toy_challenge(10, 1).value.begin(), 32, ch.begin());
  BindResult expect = bind_challenge(std::move(raw), ch, 0, toy_config());
  CHECK(rec.chunks[0].payload == expect.payload);
}

TEST_CASE("coupling digest covers the chunk's secondary window") {
  SessionConfig cfg = toy_config();
  cfg.coupling_enabled = true;
  Rig rig(1);
  RecordingSession session(cfg, 10, rig.ptrs);
  SceneSource scene = SceneSource::seeded({{7}});
  Bytes window(40, 0xcd);
  session.record_chunk(scene, toy_challenge(10, 1), 10, 16, window);
  Recording rec = session.finalize(17);
  REQUIRE(rec.chunks[0].coupling_digest.has_value());
  CHECK(*rec.chunks[0].coupling_digest == couple_modalities(window));
}

TEST_CASE("finalize refuses an empty session and double finalize") {
  Rig rig(1);
  RecordingSession session(toy_config(), 10, rig.ptrs);
  CHECK_THROWS_AS(session.finalize(11), Error);
  SceneSource scene = SceneSource::seeded({{8}});
  session.record_chunk(scene, toy_challenge(10, 1), 10, 16);
  session.finalize(17);
  CHECK_THROWS_AS(session.finalize(18), Error);
}

TEST_CASE("manifest json round trip is lossless") {
  Recording rec = toy_recording();
  Recording back = manifest_from_json(manifest_to_json(rec));
  CHECK(back == rec);
  // and byte-stable when re-serialized
  CHECK(manifest_to_json(back) == manifest_to_json(rec));
}

TEST_CASE("manifest file save/load") {
  auto path = std::filesystem::temp_directory_path() / "tba_manifest_test.json";
  Recording rec = toy_recording(2);
  save_manifest(rec, path);
  CHECK(load_manifest(path) == rec);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_manifest(path), Error);
}

TEST_CASE("manifest rejects tampered documents") {
  std::string doc = manifest_to_json(toy_recording(2));
  auto pos = doc.find("\"chain\"");
  REQUIRE(pos != std::string::npos);
  std::string broken = doc;
  broken.replace(pos, 7, "\"chian\"");
  CHECK_THROWS(manifest_from_json(broken));
}
