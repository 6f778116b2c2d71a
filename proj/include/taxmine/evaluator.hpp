#pragma once

#include <iosfwd>
#include <map>

#include "taxmine/extractor.hpp"

namespace taxmine {

// Directed hyponym -> hypernym graph over stemmed vertices.
class HyponymGraph {
 public:
  struct LoadStats {
    uint64_t edges = 0;
    uint64_t malformed = 0;
    uint64_t self_loops_dropped = 0;
  };

  // Two-column TSV: hyponym<TAB>hypernym. Vertices are stemmed word by word;
  // underscores become spaces; duplicate arcs collapse; edges whose sides
  // stem alike are dropped with a warning count.
  static HyponymGraph load(std::istream& in, LoadStats* stats = nullptr);

  // Both sides stemmed internally; returns false on a self-loop.
  bool add_edge(std::string_view hyponym, std::string_view hypernym);

  bool has_vertex(const std::string& stemmed) const;
  // Breadth-first search; a zero-length path counts when the vertex exists.
  bool path_exists(const std::string& from_stemmed, const std::string& to_stemmed,
                   int depth_cap = -1) const;
  size_t vertex_count() const { return ids_.size(); }
  size_t arc_count() const;

 private:
  std::map<std::string, int> ids_;
  std::vector<std::vector<int>> out_;
  int intern(const std::string& vertex);
};

enum class VerifyResult { Confirmed, NotFound };

// Stems both sides, then asks for a directed path from the hyponym (specific)
// to the hypernym (general).
VerifyResult verify(const std::string& hypernym, const std::string& hyponym,
                    const HyponymGraph& graph, int depth_cap = -1);

enum class Verdict { Pending, WordnetConfirmed, JudgeConfirmed, CoHyponym, OtherRelation, Unrelated };

std::string_view verdict_name(Verdict v);

struct SampleItem {
  PatternKind kind = PatternKind::Trivial;
  std::string hypernym;
  std::string hyponym;
  double weight = 0.0;
  bool extracted = true;  // pool: E when true, D when false
  std::string judge1, judge2;
  Verdict verdict = Verdict::Pending;
};

struct SampleStats {
  uint64_t truncated_pools = 0;  // pools smaller than per_kind
  uint64_t preconfirmed = 0;     // settled by the reference graph
};

// Seeded sampling without replacement, per kind, equal E and D sizes. When a
// graph is supplied, confirmed rows are pre-verdicted; the rest stay pending.
std::vector<SampleItem> sample_for_judges(const std::vector<HyponymyRelation>& extracted,
                                          const std::vector<HyponymyRelation>& discarded,
                                          size_t per_kind, uint64_t seed,
                                          const HyponymGraph* graph,
                                          SampleStats* stats = nullptr);

// kind  hypernym  hyponym  weight  pool(E|D)  judge1  judge2
// Judge entries: hyponymy | co-hyponym | other | unrelated; pre-verdicted
// rows carry "wordnet" in both judge columns.
void write_sample_tsv(std::ostream& out, const std::vector<SampleItem>& sample);
std::vector<SampleItem> load_sample_tsv(std::istream& in);

// Applies the two-judge rule to every pending row. Rows missing a judge
// entry stay pending; their count is returned.
size_t resolve_verdicts(std::vector<SampleItem>& sample);

struct MetricSet {
  std::optional<double> precision, recall, f1, f05;
};

double f_beta(double precision, double recall, double beta);
MetricSet metrics_from_counts(uint64_t tp, uint64_t fp, uint64_t fn);

struct KindCounts {
  uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct Metrics {
  std::map<PatternKind, KindCounts> counts;
  KindCounts total;
  std::map<PatternKind, MetricSet> micro;
  MetricSet micro_total;
  std::optional<MetricSet> macro;  // pattern-population weighted
  std::map<PatternKind, uint64_t> macro_n;
};

// DataError when the sample still has pending rows. macro_n maps each kind to
// its detected-pattern population for the weighted aggregate.
Metrics compute_metrics(const std::vector<SampleItem>& sample,
                        const std::map<PatternKind, uint64_t>* macro_n = nullptr);

// Weighted macro aggregate: sum(metric_i * n_i) / sum(n_i).
std::optional<MetricSet> macro_weighted(const std::map<PatternKind, MetricSet>& micro,
                                        const std::map<PatternKind, uint64_t>& n);

std::string metrics_to_json(const Metrics& metrics);
void print_metrics_table(std::ostream& out, const Metrics& metrics);

}  // namespace taxmine
