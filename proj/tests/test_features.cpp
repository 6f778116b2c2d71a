#include "taxmine/features.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

using namespace taxmine;

namespace {

QueryRecord rec(std::string query, int64_t t = 0, std::optional<uint64_t> count = std::nullopt) {
  QueryRecord r;
  r.user_id = "u";
  r.query = query;
  r.query_norm = normalize_query(query);
  r.timestamp = t;
  r.result_count = count;
  return r;
}

size_t slot(std::string_view name) {
  const auto& names = feature_names();
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  FAIL("unknown feature ", name);
  return 0;
}

std::string random_printable(std::mt19937_64& rng) {
  std::string s;
  size_t len = 1 + rng() % 14;
  for (size_t i = 0; i < len; ++i) s.push_back(static_cast<char>(' ' + rng() % 95));
  s = normalize_query(s);
  return s.empty() ? "x" : s;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("feature names are 27 and unique") {
  const auto& names = feature_names();
  CHECK(names.size() == kFeatureCount);
  std::set<std::string_view> unique(names.begin(), names.end());
  CHECK(unique.size() == kFeatureCount);
}

TEST_CASE("identity pair maxes similarity features and zeroes the time gap") {
  PairSessionContext ctx;
  FeatureVector f = compute_features(rec("fish food", 100), rec("fish food", 100), ctx);
  CHECK(f[slot("term_jaccard")] == 1.0);
  CHECK(f[slot("char3_cosine")] == 1.0);
  CHECK(f[slot("levenshtein_norm")] == 0.0);
  CHECK(f[slot("prefix_norm")] == 1.0);
  CHECK(f[slot("substring")] == 1.0);
  CHECK(f[slot("soundex_cosine")] == 1.0);
  CHECK(f[slot("soundex_jaccard")] == 1.0);
  CHECK(f[slot("time_delta")] == 0.0);
  CHECK(f[slot("term_delta")] == 0.0);
  CHECK(f[slot("geometric_y")] == 1.0);
  CHECK(f[slot("same_half_hour")] == 1.0);
}

TEST_CASE("soundex similarity floors the raw-term similarity for phonetic variants") {
  PairSessionContext ctx;
  FeatureVector k = compute_features(rec("katherine smith"), rec("catherine smith"), ctx);
  CHECK(k[slot("soundex_jaccard")] >= k[slot("term_jaccard")]);

  // Same leading letter: the codes collapse and the phonetic score exceeds
  // the raw one outright.
  FeatureVector j = compute_features(rec("jon smith"), rec("john smith"), ctx);
  CHECK(j[slot("term_jaccard")] == doctest::Approx(1.0 / 3.0));
  CHECK(j[slot("soundex_jaccard")] == 1.0);
  CHECK(j[slot("soundex_overlap")] == 2.0);
}

TEST_CASE("phonetically unrelated disjoint pair zeroes the soundex block") {
  PairSessionContext ctx;
  FeatureVector f = compute_features(rec("zzyzx"), rec("ohio"), ctx);
  CHECK(f[slot("soundex_cosine")] == 0.0);
  CHECK(f[slot("soundex_jaccard")] == 0.0);
  CHECK(f[slot("soundex_overlap")] == 0.0);
}

TEST_CASE("symmetric features are swap-invariant, directional ones negate") {
  std::mt19937_64 rng(61);
  static const std::string_view kSymmetric[] = {
      "term_jaccard", "term_overlap",    "char3_cosine",   "levenshtein_norm",
      "prefix_norm",  "substring",       "soundex_cosine", "soundex_jaccard",
      "soundex_overlap", "same_half_hour", "geometric_y",
  };
  static const std::string_view kDirectional[] = {"term_delta", "char_delta", "time_delta",
                                                  "count_ratio_log10"};
  PairSessionContext ctx;
  for (int i = 0; i < 300; ++i) {
    QueryRecord a = rec(random_printable(rng), static_cast<int64_t>(rng() % 100000),
                        1 + rng() % 1000000);
    QueryRecord b = rec(random_printable(rng), static_cast<int64_t>(rng() % 100000),
                        1 + rng() % 1000000);
    FeatureVector ab = compute_features(a, b, ctx);
    FeatureVector ba = compute_features(b, a, ctx);
    for (auto name : kSymmetric) {
      CHECK(ab[slot(name)] == doctest::Approx(ba[slot(name)]).epsilon(1e-12));
    }
    for (auto name : kDirectional) {
      CHECK(ab[slot(name)] == doctest::Approx(-ba[slot(name)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("no feature is ever NaN or infinite on fuzzed printable pairs") {
  std::mt19937_64 rng(62);
  PairSessionContext ctx;
  for (int i = 0; i < 1000; ++i) {
    QueryRecord a = rec(random_printable(rng), static_cast<int64_t>(rng() % 1000000));
    QueryRecord b = rec(random_printable(rng), static_cast<int64_t>(rng() % 1000000));
    if (rng() % 2) a.result_count = rng() % 10000000;
    if (rng() % 2) b.result_count = rng() % 10000000;
    ctx.q1_position = static_cast<uint32_t>(rng() % 10);
    ctx.q2_position = static_cast<uint32_t>(rng() % 10);
    ctx.session_length = 10;
    FeatureVector f = compute_features(a, b, ctx);
    for (double v : f) CHECK(std::isfinite(v));
  }
}

TEST_CASE("count ratio uses log10 and defaults to zero when missing") {
  PairSessionContext ctx;
  FeatureVector f = compute_features(rec("a query", 0, 1000000), rec("b query", 0, 1000), ctx);
  CHECK(f[slot("count_ratio_log10")] == doctest::Approx(3.0));
  FeatureVector g = compute_features(rec("a query", 0), rec("b query", 0, 1000), ctx);
  CHECK(g[slot("count_ratio_log10")] == 0.0);
}

TEST_CASE("session context flows through") {
  PairSessionContext ctx;
  ctx.q1_position = 1;
  ctx.q2_position = 4;
  ctx.session_length = 6;
  ctx.clicks_q1 = 2;
  ctx.clicks_q2 = 1;
  ctx.avg_clicks_to_later = 1.5;
  ctx.cooccurring_sessions = 3;
  FeatureVector f = compute_features(rec("one"), rec("two"), ctx);
  CHECK(f[slot("q1_pos")] == 1.0);
  CHECK(f[slot("q2_pos")] == 4.0);
  CHECK(f[slot("session_len")] == 6.0);
  CHECK(f[slot("between")] == 2.0);
  CHECK(f[slot("q1_clicks")] == 2.0);
  CHECK(f[slot("q2_clicks")] == 1.0);
  CHECK(f[slot("avg_clicks_begin")] == 1.5);
  CHECK(f[slot("pair_sessions")] == 3.0);
}

TEST_CASE("feature csv has a header and one row per pair") {
  std::vector<FeatureRow> rows;
  PairSessionContext ctx;
  rows.push_back({"a", "b", compute_features(rec("a"), rec("b"), ctx)});
  std::ostringstream out;
  write_features_csv(out, rows);
  std::string text = out.str();
  CHECK(text.find("q1,q2,q1_terms") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

}  // TEST_SUITE
