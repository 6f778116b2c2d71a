#include "taxmine/indexer.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

namespace taxmine {

Indices build_indices(const std::vector<Session>& sessions, IndexBuildStats* stats) {
  IndexBuildStats local;
  IndexBuildStats& st = stats ? *stats : local;
  Indices idx;

  for (const Session& session : sessions) {
    SessionIndexEntry entry;
    entry.user_id = session.user_id;
    for (uint32_t pos = 0; pos < session.records.size(); ++pos) {
      const QueryRecord& rec = session.records[pos];
      SessionQueryView view;
      view.query_norm = rec.query_norm;
      view.timestamp = rec.timestamp;
      view.result_count = rec.result_count;
      if (rec.click) view.clicks.push_back(*rec.click);
      entry.queries.push_back(std::move(view));

      QueryIndexEntry& q = idx.queries[rec.query_norm];
      q.postings.push_back({session.session_id, pos, rec.timestamp});
      if (rec.result_count) {
        if (q.result_count && *q.result_count != *rec.result_count) {
          ++st.result_count_conflicts;
          q.result_count = std::max(*q.result_count, *rec.result_count);
        } else {
          q.result_count = rec.result_count;
        }
      }
    }
    idx.sessions.emplace(session.session_id, std::move(entry));
  }

  for (auto& [query, entry] : idx.queries) {
    std::sort(entry.postings.begin(), entry.postings.end(),
              [](const QueryPosting& a, const QueryPosting& b) {
                if (a.session_id != b.session_id) return a.session_id < b.session_id;
                return a.position < b.position;
              });
  }

  // One n-gram posting list pass per distinct query, in sorted query order.
  for (const auto& [query, entry] : idx.queries) {
    (void)entry;
    std::vector<std::string> terms = split_terms(query);
    std::vector<uint32_t> offsets;
    offsets.reserve(terms.size());
    uint32_t off = 0;
    for (const std::string& term : terms) {
      offsets.push_back(off);
      off += static_cast<uint32_t>(term.size()) + 1;
    }
    for (const TermGram& gram : term_ngrams(query)) {
      idx.ngrams[gram.text].push_back({query, gram.start, offsets[gram.start]});
    }
  }

  return idx;
}

PairSessionContext pair_session_stats(const std::string& q1_norm, const std::string& q2_norm,
                                      const Indices& indices) {
  PairSessionContext ctx;
  auto it1 = indices.queries.find(q1_norm);
  auto it2 = indices.queries.find(q2_norm);
  if (it1 == indices.queries.end() || it2 == indices.queries.end()) return ctx;

  std::set<std::string> sessions1, sessions2;
  for (const QueryPosting& p : it1->second.postings) sessions1.insert(p.session_id);
  for (const QueryPosting& p : it2->second.postings) sessions2.insert(p.session_id);

  double total_clicks = 0.0;
  for (const std::string& sid : sessions1) {
    if (!sessions2.count(sid)) continue;
    auto sit = indices.sessions.find(sid);
    if (sit == indices.sessions.end()) continue;
    const auto& queries = sit->second.queries;

    uint32_t pos1 = 0, pos2 = 0;
    bool found1 = false, found2 = false;
    for (uint32_t i = 0; i < queries.size(); ++i) {
      if (!found1 && queries[i].query_norm == q1_norm) {
        pos1 = i;
        found1 = true;
      }
      if (!found2 && queries[i].query_norm == q2_norm) {
        pos2 = i;
        found2 = true;
      }
      if (found1 && found2) break;
    }
    if (!found1 || !found2) continue;

    uint32_t later = std::max(pos1, pos2);
    uint32_t clicks_before = 0;
    for (uint32_t i = 0; i < later; ++i) {
      clicks_before += static_cast<uint32_t>(queries[i].clicks.size());
    }
    if (ctx.cooccurring_sessions == 0) {
      ctx.q1_position = pos1;
      ctx.q2_position = pos2;
      ctx.session_length = static_cast<uint32_t>(queries.size());
      for (const auto& view : queries) {
        if (view.query_norm == q1_norm) ctx.clicks_q1 += static_cast<uint32_t>(view.clicks.size());
        if (view.query_norm == q2_norm) ctx.clicks_q2 += static_cast<uint32_t>(view.clicks.size());
      }
    }
    total_clicks += clicks_before;
    ++ctx.cooccurring_sessions;
  }
  if (ctx.cooccurring_sessions > 0) {
    ctx.avg_clicks_to_later = total_clicks / ctx.cooccurring_sessions;
  }
  return ctx;
}

std::vector<Session> sessions_from_index(const SessionIndex& sessions) {
  std::vector<Session> out;
  out.reserve(sessions.size());
  for (const auto& [sid, entry] : sessions) {
    Session session;
    session.session_id = sid;
    session.user_id = entry.user_id;
    for (const SessionQueryView& view : entry.queries) {
      QueryRecord rec;
      rec.user_id = entry.user_id;
      rec.query = view.query_norm;
      rec.query_norm = view.query_norm;
      rec.timestamp = view.timestamp;
      rec.result_count = view.result_count;
      if (!view.clicks.empty()) rec.click = view.clicks.front();
      session.records.push_back(std::move(rec));
    }
    out.push_back(std::move(session));
  }
  return out;
}

namespace {
constexpr std::string_view kSnapshotMagic = "taxmine-index";
constexpr int kSnapshotVersion = 1;
}  // namespace

void save_index_snapshot(std::ostream& out, const Indices& indices) {
  out << kSnapshotMagic << '\t' << kSnapshotVersion << '\n';
  for (const auto& [sid, entry] : indices.sessions) {
    out << "S\t" << sid << '\t' << entry.user_id << '\t' << entry.queries.size() << '\n';
    for (const SessionQueryView& view : entry.queries) {
      out << "R\t" << view.query_norm << '\t' << view.timestamp << '\t';
      if (view.result_count) out << *view.result_count;
      out << '\t';
      if (!view.clicks.empty()) {
        out << view.clicks.front().rank << '\t' << view.clicks.front().url_host;
      } else {
        out << '\t';
      }
      out << '\n';
    }
  }
}

Indices load_index_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("index snapshot: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::vector<std::string_view> header = split_tabs(line);
    if (header.size() != 2 || header[0] != kSnapshotMagic ||
        parse_i64(header[1]) != std::optional<int64_t>(kSnapshotVersion)) {
      throw DataError("index snapshot: unsupported header: " + line);
    }
  }

  std::vector<Session> sessions;
  uint64_t expected = 0;
  uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f[0] == "S") {
      if (expected != 0) throw DataError("index snapshot: truncated session before line " +
                                         std::to_string(line_no));
      if (f.size() != 4) throw DataError("index snapshot: bad session row at line " +
                                         std::to_string(line_no));
      auto n = parse_u64(f[3]);
      if (!n || *n == 0) throw DataError("index snapshot: bad record count at line " +
                                         std::to_string(line_no));
      sessions.push_back(Session{std::string(f[1]), std::string(f[2]), {}});
      expected = *n;
    } else if (f[0] == "R") {
      if (sessions.empty() || expected == 0) {
        throw DataError("index snapshot: record outside session at line " + std::to_string(line_no));
      }
      if (f.size() != 6) throw DataError("index snapshot: bad record row at line " +
                                         std::to_string(line_no));
      QueryRecord rec;
      rec.user_id = sessions.back().user_id;
      rec.query = std::string(f[1]);
      rec.query_norm = rec.query;
      auto ts = parse_i64(f[2]);
      if (rec.query_norm.empty() || !ts) {
        throw DataError("index snapshot: bad record at line " + std::to_string(line_no));
      }
      rec.timestamp = *ts;
      if (!f[3].empty()) {
        auto count = parse_u64(f[3]);
        if (!count) throw DataError("index snapshot: bad count at line " + std::to_string(line_no));
        rec.result_count = *count;
      }
      if (!f[4].empty() || !f[5].empty()) {
        auto rank = parse_u64(f[4]);
        if (!rank || *rank == 0 || f[5].empty()) {
          throw DataError("index snapshot: bad click at line " + std::to_string(line_no));
        }
        rec.click = Click{static_cast<uint32_t>(*rank), std::string(f[5])};
      }
      sessions.back().records.push_back(std::move(rec));
      --expected;
    } else {
      throw DataError("index snapshot: unknown row tag at line " + std::to_string(line_no));
    }
  }
  if (expected != 0) throw DataError("index snapshot: truncated final session");
  return build_indices(sessions);
}

}  // namespace taxmine
