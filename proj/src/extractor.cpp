#include "taxmine/extractor.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

namespace taxmine {

namespace {

using QueryGramsMap = std::map<std::string, std::set<std::string>>;

std::set<std::string> gram_texts(const std::string& query) {
  std::set<std::string> out;
  for (const TermGram& gram : term_ngrams(query)) out.insert(gram.text);
  return out;
}

// Gram sets per query, read from the n-gram index when available.
QueryGramsMap collect_query_grams(const std::vector<ReformulationPattern>& patterns,
                                  const NgramIndex* ngrams) {
  QueryGramsMap map;
  for (const ReformulationPattern& p : patterns) {
    map.emplace(p.general.query_norm, std::set<std::string>{});
    map.emplace(p.specific.query_norm, std::set<std::string>{});
  }
  if (ngrams) {
    for (const auto& [gram, postings] : *ngrams) {
      for (const NgramPosting& posting : postings) {
        auto it = map.find(posting.query_norm);
        if (it != map.end()) it->second.insert(gram);
      }
    }
  }
  for (auto& [query, grams] : map) {
    if (grams.empty()) grams = gram_texts(query);
  }
  return map;
}

int sorted_intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  int n = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++n;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

size_t term_count(const std::string& s) {
  return static_cast<size_t>(std::count(s.begin(), s.end(), ' ')) + 1;
}

}  // namespace

PatternStats PatternStats::build(const std::vector<ReformulationPattern>& patterns,
                                 const NgramIndex* ngrams) {
  PatternStats stats;
  QueryGramsMap grams = collect_query_grams(patterns, ngrams);

  std::set<std::pair<std::string, std::string>> seen;
  for (const ReformulationPattern& p : patterns) {
    if (!seen.insert({p.general.query_norm, p.specific.query_norm}).second) continue;
    int id = stats.distinct_++;
    const std::set<std::string>& gen = grams.at(p.general.query_norm);
    const std::set<std::string>& spec = grams.at(p.specific.query_norm);
    for (const std::string& gram : gen) {
      stats.in_general_[gram].push_back(id);
      if (!spec.count(gram)) ++stats.general_only_[gram];
    }
    for (const std::string& gram : spec) {
      stats.in_specific_[gram].push_back(id);
      if (!gen.count(gram)) ++stats.specific_only_[gram];
    }
  }
  return stats;
}

int PatternStats::p_count(const std::string& hypernym, const std::string& hyponym) const {
  auto g = in_general_.find(hypernym);
  auto s = in_specific_.find(hyponym);
  if (g == in_general_.end() || s == in_specific_.end()) return 0;
  return sorted_intersection_size(g->second, s->second);
}

int PatternStats::g_count(const std::string& gram) const {
  auto it = general_only_.find(gram);
  return it == general_only_.end() ? 0 : it->second;
}

int PatternStats::s_count(const std::string& gram) const {
  auto it = specific_only_.find(gram);
  return it == specific_only_.end() ? 0 : it->second;
}

double weight(int p, int g, int s) {
  return (static_cast<double>(p) * p + 1.0) / (2.0 * g * s + 1.0) - 1.0;
}

double weight(const PatternStats& stats, const std::string& hypernym, const std::string& hyponym) {
  return weight(stats.p_count(hypernym, hyponym), stats.g_count(hyponym), stats.s_count(hypernym));
}

std::vector<HyponymyCandidate> candidates_trivial_or_disjoint(const ReformulationPattern& p) {
  std::vector<TermGram> general = term_ngrams(p.general.query_norm);
  std::vector<TermGram> specific = term_ngrams(p.specific.query_norm);
  std::vector<HyponymyCandidate> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const TermGram& t : general) {
    for (const TermGram& t2 : specific) {
      // A shorter hyponym would be a more general phrase than the hypernym;
      // equal text is the degenerate substring case.
      if (t2.length < t.length) continue;
      if (t2.text == t.text) continue;
      if (seen.insert({t.text, t2.text}).second) {
        out.push_back(HyponymyCandidate{t.text, t2.text});
      }
    }
  }
  return out;
}

std::optional<HyponymyCandidate> candidate_reformulation(const ReformulationPattern& p) {
  std::vector<std::string> general = split_terms(p.general.query_norm);
  std::vector<std::string> specific = split_terms(p.specific.query_norm);
  TermSet general_set(general.begin(), general.end());
  TermSet specific_set(specific.begin(), specific.end());

  std::vector<std::string> hypernym_terms, hyponym_terms;
  for (const std::string& term : general) {
    if (!specific_set.count(term)) hypernym_terms.push_back(term);
  }
  for (const std::string& term : specific) {
    if (!general_set.count(term)) hyponym_terms.push_back(term);
  }
  if (hypernym_terms.empty() || hyponym_terms.empty()) return std::nullopt;
  return HyponymyCandidate{join(hypernym_terms, " "), join(hyponym_terms, " ")};
}

namespace {

bool candidate_better(const ScoredCandidate& challenger, const ScoredCandidate& best) {
  if (challenger.weight != best.weight) return challenger.weight > best.weight;
  size_t ct = term_count(challenger.candidate.hyponym);
  size_t bt = term_count(best.candidate.hyponym);
  if (ct != bt) return ct > bt;
  if (challenger.candidate.hyponym.size() != best.candidate.hyponym.size()) {
    return challenger.candidate.hyponym.size() > best.candidate.hyponym.size();
  }
  if (challenger.candidate.hyponym != best.candidate.hyponym) {
    return challenger.candidate.hyponym < best.candidate.hyponym;
  }
  return challenger.candidate.hypernym < best.candidate.hypernym;
}

}  // namespace

std::optional<ScoredCandidate> select_relation(const std::vector<HyponymyCandidate>& candidates,
                                               const PatternStats& stats, bool accept_zero_weight) {
  std::optional<ScoredCandidate> best;
  for (const HyponymyCandidate& candidate : candidates) {
    double w = weight(stats, candidate.hypernym, candidate.hyponym);
    if (!(w > 0.0 || (accept_zero_weight && w == 0.0))) continue;
    ScoredCandidate scored{candidate, w};
    if (!best || candidate_better(scored, *best)) best = scored;
  }
  return best;
}

namespace {

bool all_stop_terms(const std::string& text, const std::set<std::string>& stoplist) {
  if (stoplist.empty()) return false;
  for (const std::string& term : split_terms(text)) {
    if (!stoplist.count(term)) return false;
  }
  return true;
}

struct Aggregate {
  double weight = 0.0;
  PatternKind kind = PatternKind::Trivial;
  uint32_t count = 0;
};

void fold(std::map<std::pair<std::string, std::string>, Aggregate>& agg,
          const HyponymyCandidate& candidate, double w, PatternKind kind, uint32_t times) {
  auto [it, inserted] = agg.try_emplace({candidate.hypernym, candidate.hyponym});
  Aggregate& a = it->second;
  if (inserted || w > a.weight) {
    a.weight = w;
    a.kind = kind;
  } else if (w == a.weight && static_cast<int>(kind) < static_cast<int>(a.kind)) {
    a.kind = kind;
  }
  a.count += times;
}

}  // namespace

ExtractResult extract_all(const std::vector<ReformulationPattern>& patterns,
                          const NgramIndex& ngrams, const ExtractOptions& options,
                          ExtractStats* stats) {
  ExtractStats local;
  ExtractStats& st = stats ? *stats : local;
  st.patterns_in += patterns.size();

  PatternStats pattern_stats = PatternStats::build(patterns, &ngrams);
  st.distinct_patterns = static_cast<uint64_t>(pattern_stats.distinct_patterns());

  // Distinct pattern -> (selection, losing candidates), evaluated once.
  struct Evaluated {
    std::optional<ScoredCandidate> selected;
    std::vector<ScoredCandidate> losers;
    PatternKind kind = PatternKind::Trivial;
    uint32_t instances = 0;
  };
  std::map<std::pair<std::string, std::string>, Evaluated> evaluated;

  for (const ReformulationPattern& p : patterns) {
    auto key = std::make_pair(p.general.query_norm, p.specific.query_norm);
    auto [it, inserted] = evaluated.try_emplace(key);
    Evaluated& ev = it->second;
    ++ev.instances;
    if (!inserted) continue;
    ev.kind = p.kind;

    std::vector<HyponymyCandidate> candidates;
    if (p.kind == PatternKind::WithReformulation) {
      if (auto candidate = candidate_reformulation(p)) candidates.push_back(*candidate);
    } else {
      candidates = candidates_trivial_or_disjoint(p);
    }
    std::erase_if(candidates, [&](const HyponymyCandidate& c) {
      return all_stop_terms(c.hypernym, options.stoplist) ||
             all_stop_terms(c.hyponym, options.stoplist);
    });

    ev.selected = select_relation(candidates, pattern_stats, options.accept_zero_weight);
    for (const HyponymyCandidate& candidate : candidates) {
      if (ev.selected && candidate == ev.selected->candidate) continue;
      ev.losers.push_back(
          {candidate, weight(pattern_stats, candidate.hypernym, candidate.hyponym)});
    }
  }

  std::map<std::pair<std::string, std::string>, Aggregate> won, lost;
  for (const auto& [key, ev] : evaluated) {
    if (ev.selected) {
      st.extractions += ev.instances;
      fold(won, ev.selected->candidate, ev.selected->weight, ev.kind, ev.instances);
    } else {
      st.barren += ev.instances;
    }
    for (const ScoredCandidate& loser : ev.losers) {
      fold(lost, loser.candidate, loser.weight, ev.kind, ev.instances);
    }
  }

  ExtractResult result;
  for (const auto& [key, a] : won) {
    result.relations.push_back({key.first, key.second, a.weight, a.kind, a.count});
  }
  for (const auto& [key, a] : lost) {
    if (won.count(key)) continue;  // extracted elsewhere: it is in the taxonomy
    result.discarded.push_back({key.first, key.second, a.weight, a.kind, a.count});
  }
  return result;
}

void write_relations_tsv(std::ostream& out, const std::vector<HyponymyRelation>& relations) {
  for (const HyponymyRelation& r : relations) {
    out << r.hypernym << '\t' << r.hyponym << '\t' << format_double(r.weight) << '\t'
        << pattern_kind_name(r.source_kind) << '\t' << r.support << '\n';
  }
}

std::vector<HyponymyRelation> load_relations_tsv(std::istream& in) {
  std::vector<HyponymyRelation> relations;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f.size() != 5) {
      throw DataError("relations file: expected 5 columns at line " + std::to_string(line_no));
    }
    auto w = parse_double(f[2]);
    auto kind = pattern_kind_from_name(f[3]);
    auto support = parse_u64(f[4]);
    if (f[0].empty() || f[1].empty() || !w || !kind || !support) {
      throw DataError("relations file: bad row at line " + std::to_string(line_no));
    }
    relations.push_back({std::string(f[0]), std::string(f[1]), *w, *kind,
                         static_cast<uint32_t>(*support)});
  }
  return relations;
}

}  // namespace taxmine
