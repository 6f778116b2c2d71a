#include "taxmine/sessionizer.hpp"

#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "taxmine/strings.hpp"

using namespace taxmine;

namespace {

QueryRecord rec(std::string user, std::string query, int64_t t) {
  QueryRecord r;
  r.user_id = std::move(user);
  r.query = query;
  r.query_norm = normalize_query(query);
  r.timestamp = t;
  return r;
}

// Test-local reimplementation of the circle rule, written against maps
// instead of sorted count vectors.
bool oracle_same_session(const std::string& a, const std::string& b, int64_t dt,
                         int64_t max_timespan) {
  auto grams = [](const std::string& s) {
    std::map<std::string, double> m;
    if (s.size() < 3) {
      m[s] += 1;
    } else {
      for (size_t i = 0; i + 3 <= s.size(); ++i) m[s.substr(i, 3)] += 1;
    }
    return m;
  };
  auto ga = grams(a), gb = grams(b);
  double dot = 0, na = 0, nb = 0;
  for (auto& [g, c] : ga) {
    na += c * c;
    auto it = gb.find(g);
    if (it != gb.end()) dot += c * it->second;
  }
  for (auto& [g, c] : gb) nb += c * c;
  double x = dot / (std::sqrt(na) * std::sqrt(nb));
  double y = dt >= max_timespan ? 0.0 : 1.0 - static_cast<double>(dt) / max_timespan;
  return (1 - x) * (1 - x) + (1 - y) * (1 - y) <= 1.0;
}

std::string random_query(std::mt19937_64& rng) {
  static const char alphabet[] = "abcdefg ";
  std::string q;
  size_t len = 1 + rng() % 12;
  for (size_t i = 0; i < len; ++i) q.push_back(alphabet[rng() % (sizeof(alphabet) - 1)]);
  q = normalize_query(q);
  return q.empty() ? "a" : q;
}

}  // namespace

TEST_SUITE("sessionizer") {

TEST_CASE("identical queries at the same time sit on the circle center") {
  GeometricParams p;
  CHECK(same_session(rec("u", "fish food", 0), rec("u", "fish food", 0), p));
}

TEST_CASE("completely different queries at the same time share the session") {
  GeometricParams p;
  // x = 0, y = 1: distance exactly 1, boundary included
  CHECK(same_session(rec("u", "abcd", 100), rec("u", "wxyz", 100), p));
}

TEST_CASE("identical queries half an hour apart share the session") {
  GeometricParams p;
  // x = 1, y = 0: the other boundary anchor
  CHECK(same_session(rec("u", "fish food", 0), rec("u", "fish food", 1800), p));
}

TEST_CASE("half-similar queries at the timespan limit fall outside") {
  GeometricParams p;
  // char_3grams("abcd") vs ("abce") have cosine 0.5; y drops to 0
  CHECK(!same_session(rec("u", "abcd", 0), rec("u", "abce", 1800), p));
}

TEST_CASE("geometric predicate is monotone in each coordinate") {
  for (double x = 0.0; x <= 1.0001; x += 0.05) {
    bool prev = false;
    for (double y = 0.0; y <= 1.0001; y += 0.05) {
      bool now = geometric_same(x, y, 1.0);
      if (prev) CHECK(now);  // once inside, larger y stays inside
      prev = now;
    }
  }
  for (double y = 0.0; y <= 1.0001; y += 0.05) {
    bool prev = false;
    for (double x = 0.0; x <= 1.0001; x += 0.05) {
      bool now = geometric_same(x, y, 1.0);
      if (prev) CHECK(now);
      prev = now;
    }
  }
}

TEST_CASE("same_session agrees with an independent oracle on 1000 pairs") {
  GeometricParams p;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    std::string a = random_query(rng);
    std::string b = random_query(rng);
    int64_t dt = static_cast<int64_t>(rng() % 4000);
    bool got = same_session(rec("u", a, 1000), rec("u", b, 1000 + dt), p);
    bool want = oracle_same_session(a, b, dt, p.max_timespan_seconds);
    CHECK_MESSAGE(got == want, a, " | ", b, " dt=", dt);
  }
}

TEST_CASE("sessionize chains refinements and splits topic shifts") {
  GeometricParams p;
  std::vector<QueryRecord> one{rec("u", "fish food", 0), rec("u", "tropical fish food", 60)};
  auto sessions = sessionize(one, p);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].records.size() == 2);

  std::vector<QueryRecord> two{rec("u", "fish food", 0), rec("u", "mortgage rates", 3600)};
  sessions = sessionize(two, p);
  CHECK(sessions.size() == 2);

  std::vector<QueryRecord> single{rec("u", "fish food", 0)};
  sessions = sessionize(single, p);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].records.size() == 1);
}

TEST_CASE("sessionize partitions the input in order") {
  GeometricParams p;
  std::mt19937_64 rng(22);
  std::vector<QueryRecord> records;
  for (int u = 0; u < 25; ++u) {
    int64_t t = 1000 + static_cast<int64_t>(rng() % 100);
    int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      records.push_back(rec("user" + std::to_string(u), random_query(rng), t));
      t += static_cast<int64_t>(rng() % 2500);
    }
  }
  auto sessions = sessionize(records, p);
  std::vector<QueryRecord> reassembled;
  for (const auto& s : sessions) {
    CHECK(!s.records.empty());
    for (const auto& r : s.records) {
      CHECK(r.user_id == s.user_id);
      reassembled.push_back(r);
    }
  }
  CHECK(reassembled == records);

  // session ids unique
  std::set<std::string> ids;
  for (const auto& s : sessions) CHECK(ids.insert(s.session_id).second);
}

TEST_CASE("sessionize with worker threads matches the serial result") {
  GeometricParams p;
  std::mt19937_64 rng(23);
  std::vector<QueryRecord> records;
  for (int u = 0; u < 40; ++u) {
    int64_t t = 0;
    for (int i = 0; i < 8; ++i) {
      records.push_back(rec("u" + std::to_string(u), random_query(rng), t));
      t += static_cast<int64_t>(rng() % 3000);
    }
  }
  CHECK(sessionize(records, p, 1) == sessionize(records, p, 4));
}

TEST_CASE("sessionize rejects unsorted input") {
  GeometricParams p;
  std::vector<QueryRecord> bad{rec("u", "a query", 100), rec("u", "b query", 50)};
  CHECK_THROWS_AS(sessionize(bad, p), std::invalid_argument);

  std::vector<QueryRecord> regrouped{rec("u", "a query", 1), rec("v", "b query", 1),
                                     rec("u", "c query", 2)};
  CHECK_THROWS_AS(sessionize(regrouped, p), std::invalid_argument);
}

TEST_CASE("params are validated") {
  CHECK_THROWS(GeometricParams{0, 1.0}.validate());
  CHECK_THROWS(GeometricParams{1800, 0.0}.validate());
  CHECK_THROWS(GeometricParams{1800, 1.5}.validate());
  GeometricParams{1800, std::sqrt(2.0)}.validate();
}

TEST_CASE("sessions tsv round-trip") {
  GeometricParams p;
  std::vector<QueryRecord> records{rec("u", "fish food", 0), rec("u", "tropical fish food", 60),
                                   rec("u", "mortgage rates", 9000)};
  records[1].click = Click{2, "fish.example"};
  records[2].result_count = 123456;
  auto sessions = sessionize(records, p);

  std::ostringstream out;
  write_sessions_tsv(out, sessions);
  std::istringstream in(out.str());
  auto loaded = load_sessions_tsv(in);
  CHECK(loaded == sessions);
}

}  // TEST_SUITE
