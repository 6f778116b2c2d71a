#include "taxmine/evaluator.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

namespace taxmine {

namespace {

std::string stem_vertex(std::string_view raw) {
  std::string text(raw);
  std::replace(text.begin(), text.end(), '_', ' ');
  return stem(normalize_query(text));
}

}  // namespace

int HyponymGraph::intern(const std::string& vertex) {
  auto [it, inserted] = ids_.emplace(vertex, static_cast<int>(out_.size()));
  if (inserted) out_.emplace_back();
  return it->second;
}

bool HyponymGraph::add_edge(std::string_view hyponym, std::string_view hypernym) {
  std::string from = stem_vertex(hyponym);
  std::string to = stem_vertex(hypernym);
  if (from.empty() || to.empty() || from == to) return false;
  int from_id = intern(from);
  int to_id = intern(to);
  auto& arcs = out_[static_cast<size_t>(from_id)];
  if (std::find(arcs.begin(), arcs.end(), to_id) == arcs.end()) arcs.push_back(to_id);
  return true;
}

HyponymGraph HyponymGraph::load(std::istream& in, LoadStats* stats) {
  LoadStats local;
  LoadStats& st = stats ? *stats : local;
  HyponymGraph graph;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty()) {
      ++st.malformed;
      continue;
    }
    if (graph.add_edge(f[0], f[1])) {
      ++st.edges;
    } else {
      ++st.self_loops_dropped;
    }
  }
  return graph;
}

bool HyponymGraph::has_vertex(const std::string& stemmed) const {
  return ids_.count(stemmed) != 0;
}

size_t HyponymGraph::arc_count() const {
  size_t n = 0;
  for (const auto& arcs : out_) n += arcs.size();
  return n;
}

bool HyponymGraph::path_exists(const std::string& from_stemmed, const std::string& to_stemmed,
                               int depth_cap) const {
  auto from = ids_.find(from_stemmed);
  auto to = ids_.find(to_stemmed);
  if (from == ids_.end() || to == ids_.end()) return false;
  if (from->second == to->second) return true;

  std::vector<char> visited(out_.size(), 0);
  std::deque<std::pair<int, int>> frontier;  // (vertex, depth)
  frontier.push_back({from->second, 0});
  visited[static_cast<size_t>(from->second)] = 1;
  while (!frontier.empty()) {
    auto [at, depth] = frontier.front();
    frontier.pop_front();
    if (depth_cap >= 0 && depth >= depth_cap) continue;
    for (int next : out_[static_cast<size_t>(at)]) {
      if (next == to->second) return true;
      if (!visited[static_cast<size_t>(next)]) {
        visited[static_cast<size_t>(next)] = 1;
        frontier.push_back({next, depth + 1});
      }
    }
  }
  return false;
}

VerifyResult verify(const std::string& hypernym, const std::string& hyponym,
                    const HyponymGraph& graph, int depth_cap) {
  std::string from = stem_vertex(hyponym);
  std::string to = stem_vertex(hypernym);
  return graph.path_exists(from, to, depth_cap) ? VerifyResult::Confirmed : VerifyResult::NotFound;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pending:
      return "pending";
    case Verdict::WordnetConfirmed:
      return "wordnet_confirmed";
    case Verdict::JudgeConfirmed:
      return "judge_confirmed";
    case Verdict::CoHyponym:
      return "co_hyponym";
    case Verdict::OtherRelation:
      return "other_relation";
    case Verdict::Unrelated:
      return "unrelated";
  }
  return "unknown";
}

namespace {

// Portable partial Fisher-Yates selection of k items, ascending output order.
std::vector<size_t> sample_indices(size_t n, size_t k, std::mt19937_64& rng) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  k = std::min(k, n);
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(rng() % (n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

std::vector<SampleItem> sample_for_judges(const std::vector<HyponymyRelation>& extracted,
                                          const std::vector<HyponymyRelation>& discarded,
                                          size_t per_kind, uint64_t seed,
                                          const HyponymGraph* graph, SampleStats* stats) {
  SampleStats local;
  SampleStats& st = stats ? *stats : local;
  std::vector<SampleItem> sample;

  static const PatternKind kKinds[] = {PatternKind::Trivial, PatternKind::WithReformulation,
                                       PatternKind::Disjoint};
  std::mt19937_64 rng(seed);
  for (PatternKind kind : kKinds) {
    for (bool from_extracted : {true, false}) {
      const auto& pool_source = from_extracted ? extracted : discarded;
      std::vector<const HyponymyRelation*> pool;
      for (const HyponymyRelation& r : pool_source) {
        if (r.source_kind == kind) pool.push_back(&r);
      }
      if (pool.size() < per_kind) ++st.truncated_pools;
      for (size_t idx : sample_indices(pool.size(), per_kind, rng)) {
        const HyponymyRelation& r = *pool[idx];
        SampleItem item;
        item.kind = kind;
        item.hypernym = r.hypernym;
        item.hyponym = r.hyponym;
        item.weight = r.weight;
        item.extracted = from_extracted;
        if (graph && verify(r.hypernym, r.hyponym, *graph) == VerifyResult::Confirmed) {
          item.verdict = Verdict::WordnetConfirmed;
          item.judge1 = "wordnet";
          item.judge2 = "wordnet";
          ++st.preconfirmed;
        }
        sample.push_back(std::move(item));
      }
    }
  }
  return sample;
}

void write_sample_tsv(std::ostream& out, const std::vector<SampleItem>& sample) {
  for (const SampleItem& item : sample) {
    out << pattern_kind_name(item.kind) << '\t' << item.hypernym << '\t' << item.hyponym << '\t'
        << format_double(item.weight) << '\t' << (item.extracted ? 'E' : 'D') << '\t'
        << item.judge1 << '\t' << item.judge2 << '\n';
  }
}

std::vector<SampleItem> load_sample_tsv(std::istream& in) {
  std::vector<SampleItem> sample;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f = split_tabs(line);
    if (f.size() != 7) {
      throw DataError("sample file: expected 7 columns at line " + std::to_string(line_no));
    }
    auto kind = pattern_kind_from_name(f[0]);
    auto w = parse_double(f[3]);
    if (!kind || f[1].empty() || f[2].empty() || !w || (f[4] != "E" && f[4] != "D")) {
      throw DataError("sample file: bad row at line " + std::to_string(line_no));
    }
    SampleItem item;
    item.kind = *kind;
    item.hypernym = std::string(f[1]);
    item.hyponym = std::string(f[2]);
    item.weight = *w;
    item.extracted = f[4] == "E";
    item.judge1 = std::string(f[5]);
    item.judge2 = std::string(f[6]);
    if (item.judge1 == "wordnet" && item.judge2 == "wordnet") {
      item.verdict = Verdict::WordnetConfirmed;
    }
    sample.push_back(std::move(item));
  }
  return sample;
}

namespace {

enum class JudgeCall { Hyponymy, CoHyponym, Other, Unrelated, Missing };

JudgeCall parse_judge(const std::string& value, uint64_t row) {
  if (value.empty()) return JudgeCall::Missing;
  std::string v = to_lower_ascii(value);
  if (v == "hyponymy") return JudgeCall::Hyponymy;
  if (v == "co-hyponym" || v == "co_hyponym") return JudgeCall::CoHyponym;
  if (v == "other") return JudgeCall::Other;
  if (v == "unrelated") return JudgeCall::Unrelated;
  throw DataError("sample: unknown judge entry '" + value + "' in row " + std::to_string(row));
}

Verdict denial_category(JudgeCall call) {
  switch (call) {
    case JudgeCall::CoHyponym:
      return Verdict::CoHyponym;
    case JudgeCall::Other:
      return Verdict::OtherRelation;
    default:
      return Verdict::Unrelated;
  }
}

}  // namespace

size_t resolve_verdicts(std::vector<SampleItem>& sample) {
  size_t pending = 0;
  uint64_t row = 0;
  for (SampleItem& item : sample) {
    ++row;
    if (item.verdict != Verdict::Pending) continue;
    JudgeCall j1 = parse_judge(item.judge1, row);
    JudgeCall j2 = parse_judge(item.judge2, row);
    if (j1 == JudgeCall::Missing || j2 == JudgeCall::Missing) {
      ++pending;
      continue;
    }
    if (j1 == JudgeCall::Hyponymy && j2 == JudgeCall::Hyponymy) {
      item.verdict = Verdict::JudgeConfirmed;
    } else if (j1 == JudgeCall::Hyponymy) {
      item.verdict = denial_category(j2);
    } else if (j2 == JudgeCall::Hyponymy) {
      item.verdict = denial_category(j1);
    } else if (j1 == j2) {
      item.verdict = denial_category(j1);
    } else {
      // Two denials that disagree on the category: unrelated.
      item.verdict = Verdict::Unrelated;
    }
  }
  return pending;
}

double f_beta(double precision, double recall, double beta) {
  double b2 = beta * beta;
  double denom = b2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

MetricSet metrics_from_counts(uint64_t tp, uint64_t fp, uint64_t fn) {
  MetricSet m;
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (m.precision && m.recall) {
    m.f1 = f_beta(*m.precision, *m.recall, 1.0);
    m.f05 = f_beta(*m.precision, *m.recall, 0.5);
  }
  return m;
}

Metrics compute_metrics(const std::vector<SampleItem>& sample,
                        const std::map<PatternKind, uint64_t>* macro_n) {
  Metrics metrics;
  for (const SampleItem& item : sample) {
    if (item.verdict == Verdict::Pending) {
      throw DataError("compute_metrics: sample has pending rows");
    }
    bool confirmed =
        item.verdict == Verdict::WordnetConfirmed || item.verdict == Verdict::JudgeConfirmed;
    KindCounts& k = metrics.counts[item.kind];
    if (item.extracted && confirmed) {
      ++k.tp;
      ++metrics.total.tp;
    } else if (item.extracted) {
      ++k.fp;
      ++metrics.total.fp;
    } else if (confirmed) {
      ++k.fn;
      ++metrics.total.fn;
    } else {
      ++k.tn;
      ++metrics.total.tn;
    }
  }
  for (const auto& [kind, counts] : metrics.counts) {
    metrics.micro[kind] = metrics_from_counts(counts.tp, counts.fp, counts.fn);
  }
  metrics.micro_total =
      metrics_from_counts(metrics.total.tp, metrics.total.fp, metrics.total.fn);
  if (macro_n) {
    metrics.macro_n = *macro_n;
    metrics.macro = macro_weighted(metrics.micro, *macro_n);
  }
  return metrics;
}

std::optional<MetricSet> macro_weighted(const std::map<PatternKind, MetricSet>& micro,
                                        const std::map<PatternKind, uint64_t>& n) {
  double total = 0;
  for (const auto& [kind, count] : n) total += static_cast<double>(count);
  if (total == 0) return std::nullopt;

  double p = 0, r = 0, f1 = 0, f05 = 0;
  for (const auto& [kind, count] : n) {
    if (count == 0) continue;
    auto it = micro.find(kind);
    if (it == micro.end()) return std::nullopt;
    const MetricSet& m = it->second;
    if (!m.precision || !m.recall || !m.f1 || !m.f05) return std::nullopt;
    double share = static_cast<double>(count);
    p += *m.precision * share;
    r += *m.recall * share;
    f1 += *m.f1 * share;
    f05 += *m.f05 * share;
  }
  MetricSet out;
  out.precision = p / total;
  out.recall = r / total;
  out.f1 = f1 / total;
  out.f05 = f05 / total;
  return out;
}

namespace {

nlohmann::json metric_set_json(const MetricSet& m) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["precision"] = opt(m.precision);
  j["recall"] = opt(m.recall);
  j["f1"] = opt(m.f1);
  j["f0.5"] = opt(m.f05);
  return j;
}

nlohmann::json counts_json(const KindCounts& c) {
  nlohmann::json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["fn"] = c.fn;
  j["tn"] = c.tn;
  return j;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return "  n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << *v;
  return os.str();
}

}  // namespace

std::string metrics_to_json(const Metrics& metrics) {
  nlohmann::json j;
  nlohmann::json kinds;
  for (const auto& [kind, counts] : metrics.counts) {
    nlohmann::json k = counts_json(counts);
    k["metrics"] = metric_set_json(metrics.micro.at(kind));
    kinds[std::string(pattern_kind_name(kind))] = std::move(k);
  }
  j["kinds"] = std::move(kinds);
  nlohmann::json total = counts_json(metrics.total);
  total["metrics"] = metric_set_json(metrics.micro_total);
  j["aggregated"] = std::move(total);
  if (metrics.macro) {
    j["macro"] = metric_set_json(*metrics.macro);
    nlohmann::json weights;
    for (const auto& [kind, count] : metrics.macro_n) {
      weights[std::string(pattern_kind_name(kind))] = count;
    }
    j["macro_n"] = std::move(weights);
  } else {
    j["macro"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void print_metrics_table(std::ostream& out, const Metrics& metrics) {
  out << "kind            |E|    |D|    TP     FP     FN     P      R      F1     F0.5\n";
  auto row = [&](std::string_view name, const KindCounts& c, const MetricSet& m) {
    uint64_t e = c.tp + c.fp;
    uint64_t d = c.fn + c.tn;
    out << std::left << std::setw(15) << name << std::right << std::setw(7) << e << std::setw(7)
        << d << std::setw(7) << c.tp << std::setw(7) << c.fp << std::setw(7) << c.fn << "  "
        << cell(m.precision) << "  " << cell(m.recall) << "  " << cell(m.f1) << "  " << cell(m.f05)
        << '\n';
  };
  for (const auto& [kind, counts] : metrics.counts) {
    row(pattern_kind_name(kind), counts, metrics.micro.at(kind));
  }
  row("aggregated", metrics.total, metrics.micro_total);
  if (metrics.macro) {
    out << std::left << std::setw(15) << "macro" << std::right << std::setw(37) << ' ' << "  "
        << cell(metrics.macro->precision) << "  " << cell(metrics.macro->recall) << "  "
        << cell(metrics.macro->f1) << "  " << cell(metrics.macro->f05) << '\n';
  }
}

}  // namespace taxmine
