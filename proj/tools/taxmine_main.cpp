#include <iostream>

#include "CLI11.hpp"
#include "taxmine/errors.hpp"
#include "taxmine/pipeline.hpp"

using taxmine::PipelineConfig;

int main(int argc, char** argv) {
  CLI::App app{"taxmine - mine hyponymy taxonomies from web-search query logs"};
  app.set_config("--config", "", "key=value config file; flags override file values");

  PipelineConfig cfg;
  app.add_option("--log", cfg.logs, "input query log (repeatable)");
  app.add_option("--format", cfg.format, "log format: aol | msn | generic")
      ->capture_default_str();
  app.add_option("--counts", cfg.counts_path, "result-count sidecar (query<TAB>count)");
  app.add_option("--sites", cfg.sites_path, "site-name list for the navigational filter");
  app.add_option("--suffixes", cfg.suffixes_path, "domain-suffix list for the navigational filter");
  app.add_option("--stoplist", cfg.stoplist_path, "terms whose pure candidates are skipped");
  app.add_option("--labeled-pairs", cfg.labeled_pairs_path,
                 "three-judge labeled pairs for classifier training");
  app.add_option("--graph", cfg.graph_path, "hyponym reference graph (hyponym<TAB>hypernym)");
  app.add_option("--judged", cfg.judged_path, "judged sample file to score instead of sampling");
  app.add_option("--outdir", cfg.outdir, "artifact directory")->capture_default_str();

  app.add_option("--max-timespan", cfg.max_timespan, "session timespan ceiling in seconds")
      ->capture_default_str();
  app.add_option("--radius", cfg.radius, "session circle radius")->capture_default_str();
  app.add_option("--subsume-ratio", cfg.subsume_ratio,
                 "result-count ratio validating a reformulation")
      ->capture_default_str();
  app.add_option("--spam-min-total-chars", cfg.spam_min_total_chars,
                 "minimum total characters per query")
      ->capture_default_str();
  app.add_option("--spam-max-term-chars", cfg.spam_max_term_chars, "maximum characters per term")
      ->capture_default_str();
  app.add_option("--spam-max-terms", cfg.spam_max_terms, "maximum terms per query")
      ->capture_default_str();
  app.add_option("--spam-min-avg-gap", cfg.spam_min_avg_gap,
                 "minimum mean seconds between a user's submissions")
      ->capture_default_str();
  app.add_flag("--no-nav", cfg.no_nav, "disable the navigational filter");
  app.add_flag("--no-spam", cfg.no_spam, "disable the spam-query filter");
  app.add_flag("--no-gap", cfg.no_gap, "disable the fast-submitter filter");
  app.add_option("--min-leaf", cfg.min_leaf, "minimum instances per tree leaf")
      ->capture_default_str();
  app.add_option("--max-depth", cfg.max_depth, "maximum tree depth")->capture_default_str();
  app.add_option("--train-seed", cfg.train_seed, "train/test shuffle seed")
      ->capture_default_str();
  app.add_flag("--accept-zero-weight", cfg.accept_zero_weight,
               "also accept candidates whose weight is exactly zero");
  app.add_option("--sample-seed", cfg.sample_seed, "judge-sample seed")->capture_default_str();
  app.add_option("--per-kind", cfg.per_kind, "sample size per pattern kind and pool")
      ->capture_default_str();
  app.add_option("--assume-unjudged", cfg.assume_unjudged,
                 "treat unjudged sample rows as: none | unrelated")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker cap for parallel stages")
      ->capture_default_str();

  app.require_subcommand(1);
  auto* ingest = app.add_subcommand("ingest", "parse logs into normalized records");
  auto* sessionize = app.add_subcommand("sessionize", "split records into topical sessions");
  auto* filter = app.add_subcommand("filter", "drop spam sessions and navigational queries");
  auto* index = app.add_subcommand("index", "build the query/session/n-gram indices");
  auto* train = app.add_subcommand("train", "induce the specialization/generalization trees");
  auto* detect = app.add_subcommand("detect", "detect specialization patterns");
  auto* extract = app.add_subcommand("extract", "extract weighted hyponymy relations");
  auto* evaluate = app.add_subcommand("evaluate", "sample for judges and compute metrics");
  auto* pipeline = app.add_subcommand("pipeline", "run every stage in order");
  auto* stats = app.add_subcommand("stats", "summarize the artifacts in outdir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.validate();
    if (ingest->parsed()) taxmine::run_ingest(cfg, std::cout);
    if (sessionize->parsed()) taxmine::run_sessionize(cfg, std::cout);
    if (filter->parsed()) taxmine::run_filter(cfg, std::cout);
    if (index->parsed()) taxmine::run_index(cfg, std::cout);
    if (train->parsed()) taxmine::run_train(cfg, std::cout);
    if (detect->parsed()) taxmine::run_detect(cfg, std::cout);
    if (extract->parsed()) taxmine::run_extract(cfg, std::cout);
    if (evaluate->parsed()) taxmine::run_evaluate(cfg, std::cout);
    if (pipeline->parsed()) taxmine::run_pipeline(cfg, std::cout);
    if (stats->parsed()) taxmine::run_stats(cfg, std::cout);
  } catch (const taxmine::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const taxmine::MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const taxmine::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
