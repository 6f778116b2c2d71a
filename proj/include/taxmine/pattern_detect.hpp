#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>

#include "taxmine/sessionizer.hpp"

namespace taxmine {

enum class PatternKind { Trivial, WithReformulation, Disjoint };

std::string_view pattern_kind_name(PatternKind kind);
std::optional<PatternKind> pattern_kind_from_name(std::string_view name);

// An ordered query pair where `specific` narrows `general`.
struct ReformulationPattern {
  PatternKind kind = PatternKind::Trivial;
  std::string session_id;
  QueryRecord general;
  QueryRecord specific;
};

enum class LexicalClass { Trivial, WithReformulationCandidate, DisjointCandidate, None };

// Trivial: q1's term sequence is a proper contiguous subsequence of q2's.
// WithReformulationCandidate: term sets properly intersect. Disjoint: no
// shared terms. None: equal queries or a containment pointing the other way.
LexicalClass classify_lexical(const QueryRecord& q1, const QueryRecord& q2);

// result_count(q1) / result_count(q2) >= ratio_threshold. Both counts must be
// present and positive (std::invalid_argument otherwise).
bool subsumes(const QueryRecord& q1, const QueryRecord& q2, double ratio_threshold);

// A same-session pair without shared terms, kept in submission order for the
// supervised cascade.
struct DisjointCandidate {
  std::string session_id;
  QueryRecord earlier;
  QueryRecord later;
};

struct DetectStats {
  uint64_t pairs = 0;
  uint64_t trivial = 0;
  uint64_t reformulation = 0;
  uint64_t disjoint_candidates = 0;
  uint64_t reformulation_unvalidatable = 0;  // result counts missing or zero
  uint64_t reformulation_rejected = 0;       // counts in the same magnitude
  uint64_t none = 0;
};

struct DetectResult {
  std::vector<ReformulationPattern> patterns;
  std::vector<DisjointCandidate> disjoint_candidates;
};

// Examines consecutive pairs; generalizations are flipped into
// specializations, reformulations are kept only when subsumption validates a
// direction, disjoint pairs are forwarded untouched.
DetectResult detect_patterns(const Session& session, double ratio_threshold,
                             DetectStats* stats = nullptr);

void write_patterns_tsv(std::ostream& out, const std::vector<ReformulationPattern>& patterns);
std::vector<ReformulationPattern> load_patterns_tsv(std::istream& in);

}  // namespace taxmine
