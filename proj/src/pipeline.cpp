#include "taxmine/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "taxmine/classifier.hpp"
#include "taxmine/errors.hpp"
#include "taxmine/evaluator.hpp"
#include "taxmine/extractor.hpp"
#include "taxmine/features.hpp"
#include "taxmine/indexer.hpp"
#include "taxmine/log_ingest.hpp"
#include "taxmine/noise_filter.hpp"
#include "taxmine/pattern_detect.hpp"
#include "taxmine/sessionizer.hpp"
#include "taxmine/strings.hpp"

namespace taxmine {

void PipelineConfig::validate() const {
  if (!log_format_from_name(format)) throw ConfigError("unknown log format: " + format);
  GeometricParams{max_timespan, radius}.validate();
  if (!(subsume_ratio > 0)) throw ConfigError("subsume-ratio must be positive");
  SpamRules{spam_min_total_chars, spam_max_term_chars, spam_max_terms, spam_min_avg_gap}
      .validate();
  if (min_leaf < 1) throw ConfigError("min-leaf must be at least 1");
  if (max_depth < 1) throw ConfigError("max-depth must be at least 1");
  if (per_kind < 1) throw ConfigError("per-kind must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (assume_unjudged != "none" && assume_unjudged != "unrelated") {
    throw ConfigError("assume-unjudged must be none or unrelated");
  }
  if (outdir.empty()) throw ConfigError("outdir must be set");
}

std::filesystem::path artifact_path(const PipelineConfig& cfg, const char* name) {
  return std::filesystem::path(cfg.outdir) / name;
}

namespace {

std::ifstream open_artifact(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(path.string());
  return in;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(path);
  return in;
}

std::ofstream open_output(const PipelineConfig& cfg, const char* name) {
  std::filesystem::create_directories(cfg.outdir);
  auto path = artifact_path(cfg, name);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

NavigationalRules build_nav_rules(const PipelineConfig& cfg) {
  NavigationalRules rules = NavigationalRules::defaults();
  if (!cfg.sites_path.empty()) {
    std::ifstream in = open_input(cfg.sites_path);
    rules.site_names = load_rule_list(in);
  }
  if (!cfg.suffixes_path.empty()) {
    std::ifstream in = open_input(cfg.suffixes_path);
    rules.domain_suffixes = load_rule_list(in);
  }
  if (rules.site_names.empty() || rules.domain_suffixes.empty() || rules.url_markers.empty()) {
    throw ConfigError("navigational rule lists must be non-empty while the filter is enabled");
  }
  return rules;
}

SpamRules build_spam_rules(const PipelineConfig& cfg) {
  return SpamRules{cfg.spam_min_total_chars, cfg.spam_max_term_chars, cfg.spam_max_terms,
                   cfg.spam_min_avg_gap};
}

std::vector<Session> load_filtered_sessions(const PipelineConfig& cfg) {
  std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kFilteredSessions));
  return load_sessions_tsv(in);
}

Indices load_indices_artifact(const PipelineConfig& cfg) {
  std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kIndexSnapshot));
  return load_index_snapshot(in);
}

std::map<PatternKind, uint64_t> pattern_populations(const std::vector<ReformulationPattern>& ps) {
  std::map<PatternKind, uint64_t> n;
  for (const ReformulationPattern& p : ps) ++n[p.kind];
  return n;
}

}  // namespace

void run_ingest(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.logs.empty()) throw ConfigError("no input logs configured");
  LogFormat format = *log_format_from_name(cfg.format);

  std::vector<QueryRecord> records;
  ParseStats stats;
  for (const std::string& path : cfg.logs) {
    std::ifstream in = open_input(path);
    parse_log(in, format, [&](QueryRecord&& rec) { records.push_back(std::move(rec)); }, stats);
  }
  sort_records(records);

  if (!cfg.counts_path.empty()) {
    std::ifstream in = open_input(cfg.counts_path);
    attach_result_counts(records, load_result_counts(in));
  }

  std::ofstream out = open_output(cfg, artifacts::kRecords);
  write_generic_tsv(out, records);
  log << "[ingest] lines=" << stats.lines << " records=" << stats.records
      << " malformed=" << stats.malformed << " header=" << stats.header_lines << "\n";
}

void run_sessionize(const PipelineConfig& cfg, std::ostream& log) {
  std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kRecords));
  ParseStats stats;
  std::vector<QueryRecord> records = parse_log(in, LogFormat::GenericTsv, stats);
  GeometricParams params{cfg.max_timespan, cfg.radius};
  std::vector<Session> sessions = sessionize(records, params, cfg.threads);
  std::ofstream out = open_output(cfg, artifacts::kSessions);
  write_sessions_tsv(out, sessions);
  log << "[sessionize] records=" << records.size() << " sessions=" << sessions.size() << "\n";
}

void run_filter(const PipelineConfig& cfg, std::ostream& log) {
  std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kSessions));
  std::vector<Session> sessions = load_sessions_tsv(in);

  NavigationalRules nav;
  SpamRules spam = build_spam_rules(cfg);
  if (!cfg.no_nav) nav = build_nav_rules(cfg);
  FilterStats stats;
  std::vector<Session> kept =
      filter_sessions(std::move(sessions), cfg.no_nav ? nullptr : &nav,
                      cfg.no_spam ? nullptr : &spam, !cfg.no_gap, &stats);

  std::ofstream out = open_output(cfg, artifacts::kFilteredSessions);
  write_sessions_tsv(out, kept);
  log << "[filter] in=" << stats.sessions_in << " out=" << stats.sessions_out
      << " spam_sessions=" << stats.sessions_dropped_spam
      << " nav_removed=" << stats.nav_queries_removed
      << " emptied=" << stats.sessions_dropped_empty
      << " fast_users=" << stats.users_dropped_fast
      << " fast_sessions=" << stats.sessions_dropped_fast << "\n";
}

void run_index(const PipelineConfig& cfg, std::ostream& log) {
  std::vector<Session> sessions = load_filtered_sessions(cfg);
  IndexBuildStats stats;
  Indices indices = build_indices(sessions, &stats);
  std::ofstream out = open_output(cfg, artifacts::kIndexSnapshot);
  save_index_snapshot(out, indices);
  log << "[index] sessions=" << indices.sessions.size() << " queries=" << indices.queries.size()
      << " ngrams=" << indices.ngrams.size()
      << " count_conflicts=" << stats.result_count_conflicts << "\n";
}

void run_train(const PipelineConfig& cfg, std::ostream& log) {
  if (cfg.labeled_pairs_path.empty()) throw ConfigError("labeled-pairs not configured");
  std::ifstream in = open_input(cfg.labeled_pairs_path);
  LabeledLoadStats load_stats;
  std::vector<LabeledPair> labeled = load_labeled_pairs(in, &load_stats);

  std::optional<Indices> indices;
  auto snapshot = artifact_path(cfg, artifacts::kIndexSnapshot);
  if (std::filesystem::exists(snapshot)) {
    std::ifstream snap(snapshot);
    indices = load_index_snapshot(snap);
  }

  TreeParams params{cfg.min_leaf, cfg.max_depth};
  TrainResult result =
      train_eval(labeled, indices ? &*indices : nullptr, 1.0 / 3.0, cfg.train_seed, params);

  open_output(cfg, artifacts::kSpecTree) << result.spec_tree.serialize() << "\n";
  open_output(cfg, artifacts::kGenTree) << result.gen_tree.serialize() << "\n";
  open_output(cfg, artifacts::kTrainReport) << result.report.to_json();
  log << "[train] rows=" << load_stats.rows << " undefined=" << load_stats.undefined_dropped
      << " usable=" << result.report.n_total << " train=" << result.report.n_train
      << " test=" << result.report.n_test << " accuracy=" << result.report.accuracy
      << (result.report.zero_variance ? " zero_variance" : "") << "\n";
}

void run_detect(const PipelineConfig& cfg, std::ostream& log) {
  std::vector<Session> sessions = load_filtered_sessions(cfg);

  std::optional<DecisionTree> spec_tree, gen_tree;
  std::optional<Indices> indices;
  auto spec_path = artifact_path(cfg, artifacts::kSpecTree);
  auto gen_path = artifact_path(cfg, artifacts::kGenTree);
  if (std::filesystem::exists(spec_path) && std::filesystem::exists(gen_path)) {
    spec_tree = DecisionTree::deserialize(slurp(spec_path));
    gen_tree = DecisionTree::deserialize(slurp(gen_path));
    indices = load_indices_artifact(cfg);
  }

  std::vector<ReformulationPattern> patterns;
  DetectStats stats;
  uint64_t cascade_spec = 0, cascade_gen = 0, cascade_discard = 0, cascade_skipped = 0;
  for (const Session& session : sessions) {
    DetectResult result = detect_patterns(session, cfg.subsume_ratio, &stats);
    for (ReformulationPattern& p : result.patterns) patterns.push_back(std::move(p));
    for (const DisjointCandidate& candidate : result.disjoint_candidates) {
      if (!spec_tree) {
        ++cascade_skipped;
        continue;
      }
      PairSessionContext ctx =
          pair_session_stats(candidate.earlier.query_norm, candidate.later.query_norm, *indices);
      FeatureVector features = compute_features(candidate.earlier, candidate.later, ctx);
      switch (cascade_classify(features, *spec_tree, *gen_tree)) {
        case CascadeOutcome::ForwardSpecialization:
          patterns.push_back({PatternKind::Disjoint, candidate.session_id, candidate.earlier,
                              candidate.later});
          ++cascade_spec;
          break;
        case CascadeOutcome::ReverseSpecialization:
          patterns.push_back({PatternKind::Disjoint, candidate.session_id, candidate.later,
                              candidate.earlier});
          ++cascade_gen;
          break;
        case CascadeOutcome::Discard:
          ++cascade_discard;
          break;
      }
    }
  }

  std::ofstream out = open_output(cfg, artifacts::kPatterns);
  write_patterns_tsv(out, patterns);
  log << "[detect] pairs=" << stats.pairs << " trivial=" << stats.trivial
      << " reformulation=" << stats.reformulation
      << " unvalidatable=" << stats.reformulation_unvalidatable
      << " same_magnitude=" << stats.reformulation_rejected
      << " disjoint_candidates=" << stats.disjoint_candidates << " cascade_spec=" << cascade_spec
      << " cascade_gen=" << cascade_gen << " cascade_discard=" << cascade_discard
      << " cascade_skipped=" << cascade_skipped << "\n";
}

void run_extract(const PipelineConfig& cfg, std::ostream& log) {
  std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kPatterns));
  std::vector<ReformulationPattern> patterns = load_patterns_tsv(in);
  Indices indices = load_indices_artifact(cfg);

  ExtractOptions options;
  options.accept_zero_weight = cfg.accept_zero_weight;
  if (!cfg.stoplist_path.empty()) {
    std::ifstream stop = open_input(cfg.stoplist_path);
    options.stoplist = load_rule_list(stop);
  }

  ExtractStats stats;
  ExtractResult result = extract_all(patterns, indices.ngrams, options, &stats);
  {
    std::ofstream out = open_output(cfg, artifacts::kRelations);
    write_relations_tsv(out, result.relations);
  }
  {
    std::ofstream out = open_output(cfg, artifacts::kDiscarded);
    write_relations_tsv(out, result.discarded);
  }
  log << "[extract] patterns=" << stats.patterns_in << " distinct=" << stats.distinct_patterns
      << " extractions=" << stats.extractions << " barren=" << stats.barren
      << " relations=" << result.relations.size() << " discarded=" << result.discarded.size()
      << "\n";
}

void run_evaluate(const PipelineConfig& cfg, std::ostream& log) {
  std::vector<HyponymyRelation> relations, discarded;
  {
    std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kRelations));
    relations = load_relations_tsv(in);
  }
  {
    std::ifstream in = open_artifact(artifact_path(cfg, artifacts::kDiscarded));
    discarded = load_relations_tsv(in);
  }

  std::optional<HyponymGraph> graph;
  HyponymGraph::LoadStats graph_stats;
  if (!cfg.graph_path.empty()) {
    std::ifstream in = open_input(cfg.graph_path);
    graph = HyponymGraph::load(in, &graph_stats);
  }

  std::vector<SampleItem> sample;
  if (!cfg.judged_path.empty()) {
    std::ifstream in = open_input(cfg.judged_path);
    sample = load_sample_tsv(in);
  } else {
    SampleStats sample_stats;
    sample = sample_for_judges(relations, discarded, cfg.per_kind, cfg.sample_seed,
                               graph ? &*graph : nullptr, &sample_stats);
    std::ofstream out = open_output(cfg, artifacts::kSample);
    write_sample_tsv(out, sample);
    log << "[evaluate] sampled=" << sample.size() << " preconfirmed=" << sample_stats.preconfirmed
        << " truncated_pools=" << sample_stats.truncated_pools;
    if (graph) {
      log << " graph_vertices=" << graph->vertex_count() << " graph_edges=" << graph_stats.edges;
    }
    log << "\n";
  }

  size_t pending = resolve_verdicts(sample);
  if (pending > 0 && cfg.assume_unjudged == "unrelated") {
    for (SampleItem& item : sample) {
      if (item.verdict == Verdict::Pending) item.verdict = Verdict::Unrelated;
    }
    pending = 0;
  }
  if (pending > 0) {
    log << "[evaluate] pending=" << pending
        << " rows await judge entries; metrics skipped (see " << artifacts::kSample << ")\n";
    return;
  }

  std::map<PatternKind, uint64_t> populations;
  auto patterns_path = artifact_path(cfg, artifacts::kPatterns);
  if (std::filesystem::exists(patterns_path)) {
    std::ifstream in(patterns_path);
    populations = pattern_populations(load_patterns_tsv(in));
  }

  Metrics metrics = compute_metrics(sample, populations.empty() ? nullptr : &populations);
  open_output(cfg, artifacts::kMetricsJson) << metrics_to_json(metrics);
  {
    std::ofstream out = open_output(cfg, artifacts::kMetricsText);
    print_metrics_table(out, metrics);
  }
  log << "[evaluate] tp=" << metrics.total.tp << " fp=" << metrics.total.fp
      << " fn=" << metrics.total.fn << " tn=" << metrics.total.tn << "\n";
}

void run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  run_ingest(cfg, log);
  run_sessionize(cfg, log);
  run_filter(cfg, log);
  run_index(cfg, log);
  if (!cfg.labeled_pairs_path.empty()) run_train(cfg, log);
  run_detect(cfg, log);
  run_extract(cfg, log);
  run_evaluate(cfg, log);
}

void run_stats(const PipelineConfig& cfg, std::ostream& out) {
  namespace fs = std::filesystem;
  bool anything = false;

  auto records_path = artifact_path(cfg, artifacts::kRecords);
  if (fs::exists(records_path)) {
    std::ifstream in(records_path);
    ParseStats stats;
    std::vector<QueryRecord> records = parse_log(in, LogFormat::GenericTsv, stats);
    std::set<std::string> users;
    for (const auto& r : records) users.insert(r.user_id);
    out << "records: " << records.size() << " (users: " << users.size() << ")\n";
    anything = true;
  }
  for (const char* name : {artifacts::kSessions, artifacts::kFilteredSessions}) {
    auto path = artifact_path(cfg, name);
    if (!fs::exists(path)) continue;
    std::ifstream in(path);
    std::vector<Session> sessions = load_sessions_tsv(in);
    size_t records = 0;
    for (const auto& s : sessions) records += s.records.size();
    out << name << ": " << sessions.size() << " sessions, " << records << " records\n";
    anything = true;
  }
  auto patterns_path = artifact_path(cfg, artifacts::kPatterns);
  if (fs::exists(patterns_path)) {
    std::ifstream in(patterns_path);
    std::vector<ReformulationPattern> patterns = load_patterns_tsv(in);
    std::map<PatternKind, uint64_t> populations = pattern_populations(patterns);
    out << "patterns: " << patterns.size();
    for (const auto& [kind, n] : populations) {
      out << " " << pattern_kind_name(kind) << "=" << n;
    }
    out << "\n";
    anything = true;
  }
  auto relations_path = artifact_path(cfg, artifacts::kRelations);
  if (fs::exists(relations_path)) {
    std::ifstream in(relations_path);
    std::vector<HyponymyRelation> relations = load_relations_tsv(in);
    uint64_t total = 0;
    for (const auto& r : relations) total += r.support;
    out << "relations: " << total << " extracted, " << relations.size() << " distinct";
    if (relations.size() > 0) {
      out << " (dedup ratio " << format_double(static_cast<double>(total) /
                                               static_cast<double>(relations.size()))
          << ")";
    }
    out << "\n";
    anything = true;
  }
  auto discarded_path = artifact_path(cfg, artifacts::kDiscarded);
  if (fs::exists(discarded_path)) {
    std::ifstream in(discarded_path);
    out << "discarded pool: " << load_relations_tsv(in).size() << " distinct candidates\n";
    anything = true;
  }
  auto sample_path = artifact_path(cfg, artifacts::kSample);
  if (fs::exists(sample_path)) {
    std::ifstream in(sample_path);
    std::vector<SampleItem> sample = load_sample_tsv(in);
    size_t confirmed = 0;
    for (const auto& item : sample) {
      if (item.verdict == Verdict::WordnetConfirmed) ++confirmed;
    }
    out << "sample: " << sample.size() << " rows, " << confirmed << " pre-confirmed\n";
    anything = true;
  }
  if (!anything) out << "no artifacts under " << cfg.outdir << "\n";
}

}  // namespace taxmine
