#include "taxmine/sessionizer.hpp"

#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

namespace taxmine {

void GeometricParams::validate() const {
  if (max_timespan_seconds <= 0) throw ConfigError("max_timespan must be positive");
  if (!(radius > 0.0) || radius > std::sqrt(2.0) + 1e-12) {
    throw ConfigError("radius must be in (0, sqrt(2)]");
  }
}

bool geometric_same(double x, double y, double radius) {
  double dx = 1.0 - x;
  double dy = 1.0 - y;
  return dx * dx + dy * dy <= radius * radius;
}

namespace {

double temporal_similarity(int64_t t1, int64_t t2, int64_t max_timespan) {
  int64_t dt = t2 >= t1 ? t2 - t1 : t1 - t2;
  if (dt >= max_timespan) return 0.0;
  return 1.0 - static_cast<double>(dt) / static_cast<double>(max_timespan);
}

}  // namespace

bool same_session(const QueryRecord& q1, const QueryRecord& q2, const GeometricParams& params) {
  double x = cosine(char_3grams(q1.query_norm), char_3grams(q2.query_norm));
  double y = temporal_similarity(q1.timestamp, q2.timestamp, params.max_timespan_seconds);
  return geometric_same(x, y, params.radius);
}

namespace {

struct UserSpan {
  size_t begin = 0;
  size_t end = 0;
};

std::vector<Session> sessionize_span(const std::vector<QueryRecord>& records, UserSpan span,
                                     const GeometricParams& params) {
  std::vector<Session> sessions;
  const std::string& user = records[span.begin].user_id;
  size_t seq = 0;
  Session open;
  CountVector prev_grams;
  for (size_t i = span.begin; i < span.end; ++i) {
    const QueryRecord& rec = records[i];
    if (i > span.begin && rec.timestamp < records[i - 1].timestamp) {
      throw std::invalid_argument("sessionize: records not time-sorted for user " + user);
    }
    CountVector grams = char_3grams(rec.query_norm);
    bool chain = false;
    if (!open.records.empty()) {
      double x = cosine(prev_grams, grams);
      double y = temporal_similarity(open.records.back().timestamp, rec.timestamp,
                                     params.max_timespan_seconds);
      chain = geometric_same(x, y, params.radius);
    }
    if (!chain && !open.records.empty()) {
      sessions.push_back(std::move(open));
      open = Session{};
    }
    if (open.records.empty()) {
      open.session_id = user + ":" + std::to_string(seq++);
      open.user_id = user;
    }
    open.records.push_back(rec);
    prev_grams = std::move(grams);
  }
  if (!open.records.empty()) sessions.push_back(std::move(open));
  return sessions;
}

}  // namespace

std::vector<Session> sessionize(const std::vector<QueryRecord>& records,
                                const GeometricParams& params, int threads) {
  params.validate();
  if (records.empty()) return {};

  std::vector<UserSpan> spans;
  std::set<std::string> seen;
  size_t begin = 0;
  for (size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].user_id != records[begin].user_id) {
      if (!seen.insert(records[begin].user_id).second) {
        throw std::invalid_argument("sessionize: records not grouped by user: " +
                                    records[begin].user_id);
      }
      spans.push_back({begin, i});
      begin = i;
    }
  }

  std::vector<std::vector<Session>> per_user(spans.size());
  if (threads <= 1 || spans.size() < 2) {
    for (size_t s = 0; s < spans.size(); ++s) {
      per_user[s] = sessionize_span(records, spans[s], params);
    }
  } else {
    size_t workers = std::min<size_t>(static_cast<size_t>(threads), spans.size());
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (size_t s = w; s < spans.size(); s += workers) {
            per_user[s] = sessionize_span(records, spans[s], params);
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<Session> out;
  for (auto& chunk : per_user) {
    for (auto& session : chunk) out.push_back(std::move(session));
  }
  return out;
}

void write_sessions_tsv(std::ostream& out, const std::vector<Session>& sessions) {
  for (const Session& session : sessions) {
    for (size_t pos = 0; pos < session.records.size(); ++pos) {
      const QueryRecord& rec = session.records[pos];
      out << session.session_id << '\t' << session.user_id << '\t' << pos << '\t' << rec.query
          << '\t' << rec.timestamp << '\t';
      if (rec.result_count) out << *rec.result_count;
      out << '\t';
      if (rec.click) {
        out << rec.click->rank << '\t' << rec.click->url_host;
      } else {
        out << '\t';
      }
      out << '\n';
    }
  }
}

std::vector<Session> load_sessions_tsv(std::istream& in) {
  std::vector<Session> sessions;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f.size() != 8) {
      throw DataError("sessions file: expected 8 columns at line " + std::to_string(line_no));
    }
    QueryRecord rec;
    rec.user_id = std::string(f[1]);
    rec.query = std::string(f[3]);
    rec.query_norm = normalize_query(rec.query);
    auto ts = parse_i64(f[4]);
    auto pos = parse_u64(f[2]);
    if (rec.user_id.empty() || rec.query_norm.empty() || !ts || !pos) {
      throw DataError("sessions file: bad row at line " + std::to_string(line_no));
    }
    rec.timestamp = *ts;
    if (!f[5].empty()) {
      auto count = parse_u64(f[5]);
      if (!count) throw DataError("sessions file: bad result count at line " + std::to_string(line_no));
      rec.result_count = *count;
    }
    if (!f[6].empty() || !f[7].empty()) {
      auto rank = parse_u64(f[6]);
      if (!rank || *rank == 0 || f[7].empty()) {
        throw DataError("sessions file: bad click at line " + std::to_string(line_no));
      }
      rec.click = Click{static_cast<uint32_t>(*rank), std::string(f[7])};
    }

    std::string session_id(f[0]);
    if (sessions.empty() || sessions.back().session_id != session_id) {
      if (*pos != 0) {
        throw DataError("sessions file: session does not start at position 0 at line " +
                        std::to_string(line_no));
      }
      sessions.push_back(Session{session_id, rec.user_id, {}});
    } else if (*pos != sessions.back().records.size()) {
      throw DataError("sessions file: non-consecutive position at line " + std::to_string(line_no));
    }
    if (sessions.back().user_id != rec.user_id) {
      throw DataError("sessions file: user change inside session at line " + std::to_string(line_no));
    }
    sessions.back().records.push_back(std::move(rec));
  }
  return sessions;
}

}  // namespace taxmine
