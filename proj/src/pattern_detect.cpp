#include "taxmine/pattern_detect.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

namespace taxmine {

std::string_view pattern_kind_name(PatternKind kind) {
  switch (kind) {
    case PatternKind::Trivial:
      return "trivial";
    case PatternKind::WithReformulation:
      return "reformulation";
    case PatternKind::Disjoint:
      return "disjoint";
  }
  return "unknown";
}

std::optional<PatternKind> pattern_kind_from_name(std::string_view name) {
  if (name == "trivial") return PatternKind::Trivial;
  if (name == "reformulation") return PatternKind::WithReformulation;
  if (name == "disjoint") return PatternKind::Disjoint;
  return std::nullopt;
}

namespace {

bool contiguous_subsequence(const std::vector<std::string>& needle,
                            const std::vector<std::string>& haystack) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool match = true;
    for (size_t i = 0; i < needle.size(); ++i) {
      if (haystack[start + i] != needle[i]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

}  // namespace

LexicalClass classify_lexical(const QueryRecord& q1, const QueryRecord& q2) {
  if (q1.query_norm == q2.query_norm) return LexicalClass::None;
  std::vector<std::string> t1 = split_terms(q1.query_norm);
  std::vector<std::string> t2 = split_terms(q2.query_norm);
  if (t1.size() < t2.size() && contiguous_subsequence(t1, t2)) return LexicalClass::Trivial;

  TermSet s1(t1.begin(), t1.end());
  TermSet s2(t2.begin(), t2.end());
  size_t inter = overlap(s1, s2);
  if (inter == 0) return LexicalClass::DisjointCandidate;
  bool s1_in_s2 = inter == s1.size();
  bool s2_in_s1 = inter == s2.size();
  if (!s1_in_s2 && !s2_in_s1) return LexicalClass::WithReformulationCandidate;
  return LexicalClass::None;
}

bool subsumes(const QueryRecord& q1, const QueryRecord& q2, double ratio_threshold) {
  if (!q1.result_count || !q2.result_count || *q1.result_count == 0 || *q2.result_count == 0) {
    throw std::invalid_argument("subsumes: both result counts must be present and positive");
  }
  double ratio =
      static_cast<double>(*q1.result_count) / static_cast<double>(*q2.result_count);
  return ratio >= ratio_threshold;
}

DetectResult detect_patterns(const Session& session, double ratio_threshold, DetectStats* stats) {
  DetectStats local;
  DetectStats& st = stats ? *stats : local;
  DetectResult result;

  auto has_count = [](const QueryRecord& r) { return r.result_count && *r.result_count > 0; };

  for (size_t i = 0; i + 1 < session.records.size(); ++i) {
    const QueryRecord& a = session.records[i];
    const QueryRecord& b = session.records[i + 1];
    ++st.pairs;

    LexicalClass forward = classify_lexical(a, b);
    switch (forward) {
      case LexicalClass::Trivial:
        result.patterns.push_back({PatternKind::Trivial, session.session_id, a, b});
        ++st.trivial;
        break;
      case LexicalClass::DisjointCandidate:
        result.disjoint_candidates.push_back({session.session_id, a, b});
        ++st.disjoint_candidates;
        break;
      case LexicalClass::WithReformulationCandidate: {
        if (!has_count(a) || !has_count(b)) {
          ++st.reformulation_unvalidatable;
          break;
        }
        if (subsumes(a, b, ratio_threshold)) {
          result.patterns.push_back({PatternKind::WithReformulation, session.session_id, a, b});
          ++st.reformulation;
        } else if (subsumes(b, a, ratio_threshold)) {
          result.patterns.push_back({PatternKind::WithReformulation, session.session_id, b, a});
          ++st.reformulation;
        } else {
          ++st.reformulation_rejected;
        }
        break;
      }
      case LexicalClass::None: {
        // The reverse direction is a generalization; antisymmetry turns it
        // into a specialization with the roles swapped.
        if (classify_lexical(b, a) == LexicalClass::Trivial) {
          result.patterns.push_back({PatternKind::Trivial, session.session_id, b, a});
          ++st.trivial;
        } else {
          ++st.none;
        }
        break;
      }
    }
  }
  return result;
}

void write_patterns_tsv(std::ostream& out, const std::vector<ReformulationPattern>& patterns) {
  for (const ReformulationPattern& p : patterns) {
    out << pattern_kind_name(p.kind) << '\t' << p.session_id << '\t' << p.general.query_norm
        << '\t' << p.specific.query_norm << '\t';
    if (p.general.result_count) out << *p.general.result_count;
    out << '\t';
    if (p.specific.result_count) out << *p.specific.result_count;
    out << '\n';
  }
}

std::vector<ReformulationPattern> load_patterns_tsv(std::istream& in) {
  std::vector<ReformulationPattern> patterns;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f.size() != 6) {
      throw DataError("patterns file: expected 6 columns at line " + std::to_string(line_no));
    }
    auto kind = pattern_kind_from_name(f[0]);
    if (!kind) throw DataError("patterns file: unknown kind at line " + std::to_string(line_no));
    ReformulationPattern p;
    p.kind = *kind;
    p.session_id = std::string(f[1]);
    p.general.query = std::string(f[2]);
    p.general.query_norm = normalize_query(p.general.query);
    p.specific.query = std::string(f[3]);
    p.specific.query_norm = normalize_query(p.specific.query);
    if (p.general.query_norm.empty() || p.specific.query_norm.empty()) {
      throw DataError("patterns file: empty query at line " + std::to_string(line_no));
    }
    if (!f[4].empty()) {
      auto count = parse_u64(f[4]);
      if (!count) throw DataError("patterns file: bad count at line " + std::to_string(line_no));
      p.general.result_count = *count;
    }
    if (!f[5].empty()) {
      auto count = parse_u64(f[5]);
      if (!count) throw DataError("patterns file: bad count at line " + std::to_string(line_no));
      p.specific.result_count = *count;
    }
    patterns.push_back(std::move(p));
  }
  return patterns;
}

}  // namespace taxmine
