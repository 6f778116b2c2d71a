#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace taxmine {

struct PipelineConfig {
  // inputs
  std::vector<std::string> logs;
  std::string format = "generic";  // aol | msn | generic
  std::string counts_path;
  std::string sites_path;
  std::string suffixes_path;
  std::string stoplist_path;
  std::string labeled_pairs_path;
  std::string graph_path;
  std::string judged_path;
  std::string outdir = "out";

  // sessionization
  int64_t max_timespan = 1800;
  double radius = 1.0;

  // pattern detection
  double subsume_ratio = 10.0;

  // noise filtering
  uint32_t spam_min_total_chars = 3;
  uint32_t spam_max_term_chars = 25;
  uint32_t spam_max_terms = 5;
  double spam_min_avg_gap = 7.0;
  bool no_nav = false;
  bool no_spam = false;
  bool no_gap = false;

  // classifier
  int min_leaf = 2;
  int max_depth = 25;
  uint64_t train_seed = 7;

  // extraction
  bool accept_zero_weight = false;

  // evaluation
  uint64_t sample_seed = 13;
  uint64_t per_kind = 500;
  std::string assume_unjudged = "none";  // none | unrelated

  int threads = 1;

  void validate() const;  // ConfigError before any work
};

namespace artifacts {
inline constexpr const char* kRecords = "records.tsv";
inline constexpr const char* kSessions = "sessions.tsv";
inline constexpr const char* kFilteredSessions = "sessions_filtered.tsv";
inline constexpr const char* kIndexSnapshot = "index.tsv";
inline constexpr const char* kSpecTree = "spec_tree.json";
inline constexpr const char* kGenTree = "gen_tree.json";
inline constexpr const char* kTrainReport = "train_report.json";
inline constexpr const char* kPatterns = "patterns.tsv";
inline constexpr const char* kRelations = "relations.tsv";
inline constexpr const char* kDiscarded = "discarded.tsv";
inline constexpr const char* kSample = "sample.tsv";
inline constexpr const char* kMetricsJson = "metrics.json";
inline constexpr const char* kMetricsText = "metrics.txt";
}  // namespace artifacts

std::filesystem::path artifact_path(const PipelineConfig& cfg, const char* name);

void run_ingest(const PipelineConfig& cfg, std::ostream& log);
void run_sessionize(const PipelineConfig& cfg, std::ostream& log);
void run_filter(const PipelineConfig& cfg, std::ostream& log);
void run_index(const PipelineConfig& cfg, std::ostream& log);
void run_train(const PipelineConfig& cfg, std::ostream& log);
void run_detect(const PipelineConfig& cfg, std::ostream& log);
void run_extract(const PipelineConfig& cfg, std::ostream& log);
void run_evaluate(const PipelineConfig& cfg, std::ostream& log);
void run_pipeline(const PipelineConfig& cfg, std::ostream& log);
void run_stats(const PipelineConfig& cfg, std::ostream& out);

}  // namespace taxmine
