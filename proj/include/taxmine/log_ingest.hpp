#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace taxmine {

struct Click {
  uint32_t rank = 0;  // 1-based result position
  std::string url_host;
  bool operator==(const Click&) const = default;
};

struct QueryRecord {
  std::string user_id;
  std::string query;       // as logged
  std::string query_norm;  // lowercased, whitespace-collapsed
  int64_t timestamp = 0;   // UTC seconds
  std::optional<uint64_t> result_count;
  std::optional<Click> click;
  bool operator==(const QueryRecord&) const = default;
};

// AOL:     AnonID  Query  QueryTime  ItemRank  ClickURL
// MSN:     AnonID  Query  QueryTime  ResultCount  ItemRank  ClickURL
// GENERIC: user    query  timestamp  result_count  click_rank  click_host
enum class LogFormat { AolTsv, MsnTsv, GenericTsv };

std::optional<LogFormat> log_format_from_name(std::string_view name);

struct ParseStats {
  uint64_t lines = 0;
  uint64_t records = 0;
  uint64_t malformed = 0;
  uint64_t header_lines = 0;
};

// Streams well-formed records to the sink; malformed lines are counted and
// skipped. Timestamps accepted as "YYYY-MM-DD HH:MM:SS" or epoch seconds.
void parse_log(std::istream& in, LogFormat format,
               const std::function<void(QueryRecord&&)>& sink, ParseStats& stats);

std::vector<QueryRecord> parse_log(std::istream& in, LogFormat format, ParseStats& stats);

// Stable (user_id, timestamp) ordering; input order breaks ties.
void sort_records(std::vector<QueryRecord>& records);

// Sidecar `query<TAB>count` file. Duplicate keys with conflicting counts raise
// ConfigError naming the offenders.
std::map<std::string, uint64_t> load_result_counts(std::istream& in);

// Records without a result_count gain the mapped count; existing counts win.
void attach_result_counts(std::vector<QueryRecord>& records,
                          const std::map<std::string, uint64_t>& counts);

void write_generic_tsv(std::ostream& out, const std::vector<QueryRecord>& records);

}  // namespace taxmine
