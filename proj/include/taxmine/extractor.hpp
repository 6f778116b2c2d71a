#pragma once

#include <iosfwd>
#include <map>
#include <set>

#include "taxmine/indexer.hpp"
#include "taxmine/pattern_detect.hpp"

namespace taxmine {

struct HyponymyCandidate {
  std::string hypernym;  // t, from the general query
  std::string hyponym;   // t', from the specific query
  bool operator==(const HyponymyCandidate&) const = default;
};

// Corpus-wide occurrence counts over the frozen pattern set. A distinct
// (general, specific) normalized pair counts once regardless of repetition.
class PatternStats {
 public:
  static PatternStats build(const std::vector<ReformulationPattern>& patterns,
                            const NgramIndex* ngrams = nullptr);

  // Distinct patterns with t somewhere in the general query and t' in the
  // specific one.
  int p_count(const std::string& hypernym, const std::string& hyponym) const;
  // Distinct patterns where the gram appears only in the general query.
  int g_count(const std::string& gram) const;
  // Distinct patterns where the gram appears only in the specific query.
  int s_count(const std::string& gram) const;
  int distinct_patterns() const { return distinct_; }

 private:
  std::map<std::string, std::vector<int>> in_general_;
  std::map<std::string, std::vector<int>> in_specific_;
  std::map<std::string, int> general_only_;
  std::map<std::string, int> specific_only_;
  int distinct_ = 0;
};

// W = (P^2 + 1) / (2*G*S + 1) - 1
double weight(int p, int g, int s);
double weight(const PatternStats& stats, const std::string& hypernym, const std::string& hyponym);

// Cartesian product of the two term n-gram vectors. The hyponym may not be a
// term-level substring of the hypernym and must span at least as many terms.
std::vector<HyponymyCandidate> candidates_trivial_or_disjoint(const ReformulationPattern& p);

// Shared terms removed from both sides; the general remainder is the
// hypernym, the specific remainder the hyponym. Empty remainder: no candidate.
std::optional<HyponymyCandidate> candidate_reformulation(const ReformulationPattern& p);

struct ScoredCandidate {
  HyponymyCandidate candidate;
  double weight = 0.0;
};

// Highest positive weight wins; ties prefer the longer hyponym, then
// lexicographic order. No candidate above the bar: barren, nothing returned.
std::optional<ScoredCandidate> select_relation(const std::vector<HyponymyCandidate>& candidates,
                                               const PatternStats& stats,
                                               bool accept_zero_weight = false);

struct HyponymyRelation {
  std::string hypernym;
  std::string hyponym;
  double weight = 0.0;
  PatternKind source_kind = PatternKind::Trivial;
  uint32_t support = 0;
  bool operator==(const HyponymyRelation&) const = default;
};

struct ExtractOptions {
  bool accept_zero_weight = false;
  std::set<std::string> stoplist;  // candidates made only of these terms are skipped
};

struct ExtractStats {
  uint64_t patterns_in = 0;
  uint64_t distinct_patterns = 0;
  uint64_t extractions = 0;  // selections before dedup, repeats included
  uint64_t barren = 0;
};

struct ExtractResult {
  std::vector<HyponymyRelation> relations;  // deduplicated, sorted
  std::vector<HyponymyRelation> discarded;  // candidate pool that never won
};

// Phase 1 freezes PatternStats over the whole set, phase 2 selects per
// pattern. Output is independent of pattern order.
ExtractResult extract_all(const std::vector<ReformulationPattern>& patterns,
                          const NgramIndex& ngrams, const ExtractOptions& options = {},
                          ExtractStats* stats = nullptr);

void write_relations_tsv(std::ostream& out, const std::vector<HyponymyRelation>& relations);
std::vector<HyponymyRelation> load_relations_tsv(std::istream& in);

}  // namespace taxmine
