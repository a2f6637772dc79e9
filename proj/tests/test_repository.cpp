#include <doctest.h>

#include <sstream>

#include "tba/errors.hpp"
#include "tba/repository.hpp"

using namespace tba;

namespace {

HapId hid(std::uint8_t tag) {
  HapId id{};
  id.fill(tag);
  return id;
}

}  // namespace

TEST_CASE("submission discipline: the log stores h(s), published value is h(h(c))") {
  Bytes content{'c', 'o', 'n', 't', 'e', 'n', 't'};
  Digest s = prepare_submission(content);
  CHECK(s == digest(content));

  HapLog log(hid(1));
  auto rec = log.submit(s, 100);
  REQUIRE(rec.has_value());
  CHECK(rec->t == 100);
  CHECK(rec->v == digest(s.span()));
  CHECK(rec->v == digest(digest(content).span()));
  // the log never sees the content and never stores s itself
  CHECK(log.records().size() == 1);
  CHECK(log.records()[0].v != s);
}

TEST_CASE("lookup returns the earliest receipt of a value") {
  HapLog log(hid(2));
  Digest s = digest("dup");
  log.submit(s, 10);
  log.submit(digest("other"), 11);
  log.submit(s, 12);
  Digest v = digest(s.span());
  CHECK(log.lookup(v) == 10);
  CHECK_FALSE(log.lookup(digest("absent")).has_value());
}

TEST_CASE("append is monotone in time") {
  HapLog log(hid(3));
  log.submit(digest("a"), 5);
  CHECK_THROWS_AS(log.submit(digest("b"), 4), Error);
  CHECK(log.submit(digest("b"), 5).has_value());  // equal timestamps are fine
  CHECK(log.records().size() == 2);
}

TEST_CASE("dropper swallows submissions") {
  HapLog log(hid(4), HapFault::Dropper);
  CHECK_FALSE(log.submit(digest("x"), 1).has_value());
  CHECK(log.records().empty());
  CHECK_FALSE(log.lookup(digest(digest("x").span())).has_value());
}

TEST_CASE("strict majority rule") {
  Digest s = digest("content-hash");
  auto build = [&](std::size_t publishing, std::size_t total) {
    std::vector<HapLog> logs;
    for (std::size_t i = 0; i < total; ++i) {
      logs.emplace_back(hid(static_cast<std::uint8_t>(i)));
      if (i < publishing) logs[i].submit(s, 10 + i);
    }
    return logs;
  };

  // 3 of 5 is a strict majority; 2 of 5 is not
  CHECK(verify_majority(build(3, 5), s, 100));
  CHECK_FALSE(verify_majority(build(2, 5), s, 100));
  // exactly half of an even count is not a majority
  CHECK_FALSE(verify_majority(build(2, 4), s, 100));
  CHECK(verify_majority(build(3, 4), s, 100));
  // the t_max cut-off applies per log
  CHECK_FALSE(verify_majority(build(3, 5), s, 11));  // only 2 receipts by t=11
  CHECK(verify_majority(build(3, 5), s, 12));
}

TEST_CASE("majority_time is the median-ish k-th earliest receipt") {
  Digest s = digest("timed");
  std::vector<HapLog> logs;
  Timestamp times[5] = {40, 10, 30, 50, 20};
  for (std::size_t i = 0; i < 5; ++i) {
    logs.emplace_back(hid(static_cast<std::uint8_t>(i)));
    logs[i].submit(s, times[i]);
  }
  // needed = 3; sorted times 10,20,30,40,50 -> third smallest
  CHECK(majority_time(logs, s) == 30);

  SUBCASE("no majority, no time") {
    std::vector<HapLog> few;
    for (std::size_t i = 0; i < 5; ++i) few.emplace_back(hid(static_cast<std::uint8_t>(i)));
    few[0].submit(s, 1);
    few[1].submit(s, 2);
    CHECK_FALSE(majority_time(few, s).has_value());
  }
  SUBCASE("duplicates inside one log do not double-count") {
    logs[0].submit(s, 60);
    CHECK(majority_time(logs, s) == 30);
  }
}

TEST_CASE("rewriter divergence against a mirror") {
  HapLog log(hid(5), HapFault::Rewriter);
  for (Timestamp t = 1; t <= 4; ++t) log.submit(digest(std::to_string(t)), t);
  HapLog mirror = log;

  CHECK(divergent_records(log, mirror).empty());

  log.rewrite_record(2, digest("tampered"));
  auto div = divergent_records(log, mirror);
  REQUIRE(div.size() == 1);
  CHECK(div[0] == mirror.records()[2]);

  log.erase_record(0);
  CHECK(divergent_records(log, mirror).size() == 2);
}

TEST_CASE("honest logs refuse post-hoc mutation") {
  HapLog log(hid(6));
  log.submit(digest("a"), 1);
  CHECK_THROWS_AS(log.rewrite_record(0, digest("b")), Error);
  CHECK_THROWS_AS(log.erase_record(0), Error);
}

TEST_CASE("log jsonl round trip") {
  HapLog log(hid(7));
  log.submit(digest("one"), 3);
  log.submit(digest("two"), 9);
  std::stringstream ss;
  write_log_jsonl(log, ss);
  CHECK(read_log_jsonl(ss) == log.records());

  std::stringstream bad("{\"t\":1,\"v\":\"zz\"}\n");
  CHECK_THROWS_AS(read_log_jsonl(bad), Error);

  std::stringstream backwards("{\"t\":5,\"v\":\"" + digest("a").hex() + "\"}\n{\"t\":4,\"v\":\"" +
                              digest("b").hex() + "\"}\n");
  CHECK_THROWS_AS(read_log_jsonl(backwards), Error);
}
