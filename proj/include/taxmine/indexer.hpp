#pragma once

#include <iosfwd>
#include <map>

#include "taxmine/sessionizer.hpp"

namespace taxmine {

struct QueryPosting {
  std::string session_id;
  uint32_t position = 0;
  int64_t timestamp = 0;
  bool operator==(const QueryPosting&) const = default;
};

struct QueryIndexEntry {
  std::optional<uint64_t> result_count;
  std::vector<QueryPosting> postings;
  bool operator==(const QueryIndexEntry&) const = default;
};

// query_norm -> (result count, sessions/positions/times it appears in)
using QueryIndex = std::map<std::string, QueryIndexEntry>;

struct SessionQueryView {
  std::string query_norm;
  int64_t timestamp = 0;
  std::optional<uint64_t> result_count;
  std::vector<Click> clicks;
  bool operator==(const SessionQueryView&) const = default;
};

struct SessionIndexEntry {
  std::string user_id;
  std::vector<SessionQueryView> queries;
  bool operator==(const SessionIndexEntry&) const = default;
};

// session_id -> ordered queries with their click information
using SessionIndex = std::map<std::string, SessionIndexEntry>;

struct NgramPosting {
  std::string query_norm;
  uint32_t term_pos = 0;     // start offset in terms
  uint32_t char_offset = 0;  // byte offset in the query
  bool operator==(const NgramPosting&) const = default;
};

// term n-gram -> one posting per occurrence per distinct query
using NgramIndex = std::map<std::string, std::vector<NgramPosting>>;

struct Indices {
  QueryIndex queries;
  SessionIndex sessions;
  NgramIndex ngrams;
  bool operator==(const Indices&) const = default;
};

struct IndexBuildStats {
  uint64_t result_count_conflicts = 0;  // same query seen with differing counts
};

// Builds all three indices from filtered sessions. Conflicting result counts
// keep the maximum. Deterministic posting order: (session_id, position).
Indices build_indices(const std::vector<Session>& sessions, IndexBuildStats* stats = nullptr);

// Session-level aggregates for a query pair, per the pair-feature contract.
struct PairSessionContext {
  uint32_t q1_position = 0;
  uint32_t q2_position = 0;
  uint32_t session_length = 0;
  uint32_t clicks_q1 = 0;
  uint32_t clicks_q2 = 0;
  double avg_clicks_to_later = 0.0;  // mean clicks before the later query
  uint32_t cooccurring_sessions = 0;
  bool operator==(const PairSessionContext&) const = default;
};

// Aggregates over every session containing both queries; zeroed context with
// cooccurring_sessions = 0 when they never co-occur. Positions, length and
// click counts come from the first co-occurring session by id.
PairSessionContext pair_session_stats(const std::string& q1_norm, const std::string& q2_norm,
                                      const Indices& indices);

// Rebuilds sessions from the session index content. build_indices over the
// result is a fixed point.
std::vector<Session> sessions_from_index(const SessionIndex& sessions);

void save_index_snapshot(std::ostream& out, const Indices& indices);
Indices load_index_snapshot(std::istream& in);

}  // namespace taxmine
