#include "taxmine/strings.hpp"

#include "doctest.h"

using namespace taxmine;

TEST_SUITE("strings") {

TEST_CASE("normalize_query lowercases, collapses and trims") {
  CHECK(normalize_query("  Fish   FOOD \t") == "fish food");
  CHECK(normalize_query("LION") == "lion");
  CHECK(normalize_query("   ") == "");
  CHECK(normalize_query("") == "");
  CHECK(normalize_query("a\tb\nc") == "a b c");
}

TEST_CASE("normalize_query passes non-ascii bytes through") {
  CHECK(normalize_query("caf\xc3\xa9  bar") == "caf\xc3\xa9 bar");
}

TEST_CASE("split_terms") {
  CHECK(split_terms("fish food") == std::vector<std::string>{"fish", "food"});
  CHECK(split_terms("lion") == std::vector<std::string>{"lion"});
  CHECK(split_terms("") == std::vector<std::string>{});
}

TEST_CASE("split_tabs preserves empty fields") {
  auto f = split_tabs("a\t\tb\t");
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "a");
  CHECK(f[1] == "");
  CHECK(f[2] == "b");
  CHECK(f[3] == "");
}

TEST_CASE("parse_timestamp accepts both documented forms") {
  CHECK(parse_timestamp("2006-03-01 07:17:12") == 1141197432);
  CHECK(parse_timestamp("2006-05-02 10:00:00") == 1146564000);
  CHECK(parse_timestamp("1141197432") == 1141197432);
  CHECK(parse_timestamp("0") == 0);
}

TEST_CASE("parse_timestamp rejects malformed instants") {
  CHECK(!parse_timestamp("2006-13-01 00:00:00"));
  CHECK(!parse_timestamp("2006-02-29 00:00:00"));  // 2006 is not a leap year
  CHECK(!parse_timestamp("2006-03-01T07:17:12"));
  CHECK(!parse_timestamp("2006-03-01 24:00:00"));
  CHECK(!parse_timestamp("yesterday"));
  CHECK(!parse_timestamp(""));
  CHECK(parse_timestamp("2004-02-29 00:00:00").has_value());
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -1.0, 0.5, 2.0 / 3.0, 1e-9, 12345.6789}) {
    CHECK(parse_double(format_double(v)) == v);
  }
}

}  // TEST_SUITE
