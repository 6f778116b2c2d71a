#include "taxmine/log_ingest.hpp"

#include <random>
#include <sstream>

#include "doctest.h"
#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"

using namespace taxmine;

TEST_SUITE("log_ingest") {

TEST_CASE("aol line with empty click fields") {
  std::istringstream in("142\tfish food\t2006-03-01 07:17:12\t\t\n");
  ParseStats stats;
  auto records = parse_log(in, LogFormat::AolTsv, stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0].user_id == "142");
  CHECK(records[0].query_norm == "fish food");
  CHECK(records[0].timestamp == 1141197432);
  CHECK(!records[0].result_count);
  CHECK(!records[0].click);
  CHECK(stats.records == 1);
  CHECK(stats.malformed == 0);
}

TEST_CASE("aol line with click") {
  std::istringstream in("142\tFish  Food\t2006-03-01 07:17:12\t3\twww.fishfood.example\n");
  ParseStats stats;
  auto records = parse_log(in, LogFormat::AolTsv, stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0].query == "Fish  Food");
  CHECK(records[0].query_norm == "fish food");
  REQUIRE(records[0].click);
  CHECK(records[0].click->rank == 3);
  CHECK(records[0].click->url_host == "www.fishfood.example");
}

TEST_CASE("msn line carries a result count") {
  std::istringstream in("u9\tlion\t2006-05-02 10:00:00\t2400000\n");
  ParseStats stats;
  auto records = parse_log(in, LogFormat::MsnTsv, stats);
  REQUIRE(records.size() == 1);
  CHECK(records[0].result_count == 2400000);
}

TEST_CASE("empty query after normalization is counted and skipped") {
  std::istringstream in("142\t   \t2006-03-01 07:17:12\n142\tok query\t2006-03-01 07:18:12\n");
  ParseStats stats;
  auto records = parse_log(in, LogFormat::AolTsv, stats);
  CHECK(records.size() == 1);
  CHECK(stats.malformed == 1);
  CHECK(stats.lines == 2);
}

TEST_CASE("line accounting: records plus skips equal lines") {
  std::istringstream in(
      "u1\tgood one\t1141197432\n"
      "bad line\n"
      "u1\tsecond\t2006-03-01 07:17:13\n"
      "u2\tbad time\tnot a time\n"
      "u3\t\t1141197432\n");
  ParseStats stats;
  auto records = parse_log(in, LogFormat::AolTsv, stats);
  CHECK(stats.lines == 5);
  CHECK(records.size() == stats.records);
  CHECK(stats.records + stats.malformed + stats.header_lines == stats.lines);
  CHECK(stats.records == 2);
}

TEST_CASE("aol header line is skipped without counting as malformed") {
  std::istringstream in(
      "AnonID\tQuery\tQueryTime\tItemRank\tClickURL\n"
      "142\tfish food\t2006-03-01 07:17:12\t\t\n");
  ParseStats stats;
  auto records = parse_log(in, LogFormat::AolTsv, stats);
  CHECK(records.size() == 1);
  CHECK(stats.header_lines == 1);
  CHECK(stats.malformed == 0);
}

TEST_CASE("generic round-trip yields an identical stream") {
  std::mt19937_64 rng(77);
  std::vector<QueryRecord> records;
  for (int i = 0; i < 300; ++i) {
    QueryRecord r;
    r.user_id = "u" + std::to_string(rng() % 40);
    int terms = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < terms; ++t) {
      if (t) r.query += ' ';
      int len = 1 + static_cast<int>(rng() % 7);
      for (int c = 0; c < len; ++c) r.query += static_cast<char>('a' + rng() % 26);
    }
    r.query_norm = normalize_query(r.query);
    r.timestamp = 1141000000 + static_cast<int64_t>(rng() % 1000000);
    if (rng() % 3 == 0) r.result_count = rng() % 100000000;
    if (rng() % 4 == 0) r.click = Click{1 + static_cast<uint32_t>(rng() % 10), "host.example"};
    records.push_back(std::move(r));
  }
  sort_records(records);

  std::ostringstream out;
  write_generic_tsv(out, records);
  std::istringstream in(out.str());
  ParseStats stats;
  auto reparsed = parse_log(in, LogFormat::GenericTsv, stats);
  CHECK(stats.malformed == 0);
  CHECK(reparsed == records);

  std::ostringstream out2;
  write_generic_tsv(out2, reparsed);
  CHECK(out2.str() == out.str());
}

TEST_CASE("sort_records is stable within user by timestamp") {
  std::vector<QueryRecord> records;
  auto mk = [](std::string user, std::string q, int64_t t) {
    QueryRecord r;
    r.user_id = std::move(user);
    r.query = q;
    r.query_norm = normalize_query(q);
    r.timestamp = t;
    return r;
  };
  records.push_back(mk("b", "late", 10));
  records.push_back(mk("a", "tie one", 5));
  records.push_back(mk("a", "tie two", 5));
  records.push_back(mk("b", "early", 1));
  sort_records(records);
  CHECK(records[0].query == "tie one");
  CHECK(records[1].query == "tie two");  // original order preserved on ties
  CHECK(records[2].query == "early");
  CHECK(records[3].query == "late");
}

TEST_CASE("attach_result_counts") {
  auto mk = [](std::string q, std::optional<uint64_t> count) {
    QueryRecord r;
    r.query = q;
    r.query_norm = normalize_query(q);
    r.result_count = count;
    r.user_id = "u";
    return r;
  };
  std::vector<QueryRecord> records{mk("lion", std::nullopt), mk("lion", 42),
                                   mk("tiger", std::nullopt)};
  std::map<std::string, uint64_t> counts{{"lion", 500}};
  attach_result_counts(records, counts);
  CHECK(records[0].result_count == 500);  // direct lookup
  CHECK(records[1].result_count == 42);   // existing value wins
  CHECK(!records[2].result_count);        // identity under an empty mapping
}

TEST_CASE("load_result_counts flags conflicting duplicates") {
  std::istringstream good("lion\t500\nlion\t500\ntiger\t10\n");
  auto counts = load_result_counts(good);
  CHECK(counts.size() == 2);
  CHECK(counts.at("lion") == 500);

  std::istringstream bad("lion\t500\nlion\t600\n");
  CHECK_THROWS_AS(load_result_counts(bad), ConfigError);
  try {
    std::istringstream bad2("lion\t500\nlion\t600\n");
    load_result_counts(bad2);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("lion") != std::string::npos);
  }
}

TEST_CASE("unknown format name is rejected") {
  CHECK(!log_format_from_name("excite"));
  CHECK(log_format_from_name("AOL") == LogFormat::AolTsv);
  CHECK(log_format_from_name("generic") == LogFormat::GenericTsv);
}

}  // TEST_SUITE
