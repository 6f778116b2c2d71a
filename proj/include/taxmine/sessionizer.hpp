#pragma once

#include <iosfwd>

#include "taxmine/log_ingest.hpp"

namespace taxmine {

struct Session {
  std::string session_id;
  std::string user_id;
  std::vector<QueryRecord> records;
  bool operator==(const Session&) const = default;
};

struct GeometricParams {
  int64_t max_timespan_seconds = 1800;
  double radius = 1.0;
  void validate() const;  // ConfigError outside the documented ranges
};

// Circle test around (1,1): same session iff (1-x)^2 + (1-y)^2 <= r^2.
// Boundary points belong to the session.
bool geometric_same(double x, double y, double radius);

// x = char-3-gram cosine of the two normalized queries, y = temporal
// similarity clamped to [0,1] over the configured timespan.
bool same_session(const QueryRecord& q1, const QueryRecord& q2, const GeometricParams& params);

// Greedy chaining against the last record of the open session. Input must be
// grouped by user and time-sorted inside each group (contract violation
// otherwise). Output sessions partition the input in order.
std::vector<Session> sessionize(const std::vector<QueryRecord>& records,
                                const GeometricParams& params, int threads = 1);

void write_sessions_tsv(std::ostream& out, const std::vector<Session>& sessions);
std::vector<Session> load_sessions_tsv(std::istream& in);

}  // namespace taxmine
