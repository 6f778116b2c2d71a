#include "taxmine/log_ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"

namespace taxmine {

std::optional<LogFormat> log_format_from_name(std::string_view name) {
  std::string lower = to_lower_ascii(name);
  if (lower == "aol") return LogFormat::AolTsv;
  if (lower == "msn") return LogFormat::MsnTsv;
  if (lower == "generic") return LogFormat::GenericTsv;
  return std::nullopt;
}

namespace {

struct ColumnLayout {
  size_t query = 1;
  size_t time = 2;
  std::optional<size_t> count;
  size_t rank = 0;
  size_t host = 0;
  size_t max_fields = 0;
  const char* header_name = nullptr;
};

ColumnLayout layout_for(LogFormat format) {
  ColumnLayout l;
  switch (format) {
    case LogFormat::AolTsv:
      l.rank = 3;
      l.host = 4;
      l.max_fields = 5;
      l.header_name = "anonid";
      break;
    case LogFormat::MsnTsv:
      l.count = 3;
      l.rank = 4;
      l.host = 5;
      l.max_fields = 6;
      l.header_name = "anonid";
      break;
    case LogFormat::GenericTsv:
      l.count = 3;
      l.rank = 4;
      l.host = 5;
      l.max_fields = 6;
      l.header_name = "user";
      break;
  }
  return l;
}

std::string_view field_or_empty(const std::vector<std::string_view>& fields, size_t idx) {
  return idx < fields.size() ? fields[idx] : std::string_view{};
}

}  // namespace

void parse_log(std::istream& in, LogFormat format,
               const std::function<void(QueryRecord&&)>& sink, ParseStats& stats) {
  const ColumnLayout layout = layout_for(format);
  std::string line;
  bool first_line = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++stats.lines;
    std::vector<std::string_view> fields = split_tabs(line);

    if (first_line) {
      first_line = false;
      if (!fields.empty() && to_lower_ascii(fields[0]) == layout.header_name) {
        ++stats.header_lines;
        continue;
      }
    }

    if (fields.size() < 3 || fields.size() > layout.max_fields) {
      ++stats.malformed;
      continue;
    }

    QueryRecord rec;
    rec.user_id = std::string(fields[0]);
    if (rec.user_id.empty()) {
      ++stats.malformed;
      continue;
    }
    rec.query = std::string(fields[layout.query]);
    rec.query_norm = normalize_query(rec.query);
    if (rec.query_norm.empty()) {
      ++stats.malformed;
      continue;
    }
    auto ts = parse_timestamp(fields[layout.time]);
    if (!ts) {
      ++stats.malformed;
      continue;
    }
    rec.timestamp = *ts;

    if (layout.count) {
      std::string_view raw = field_or_empty(fields, *layout.count);
      if (!raw.empty()) {
        auto value = parse_u64(raw);
        if (!value) {
          ++stats.malformed;
          continue;
        }
        rec.result_count = *value;
      }
    }

    std::string_view rank_raw = field_or_empty(fields, layout.rank);
    std::string_view host_raw = field_or_empty(fields, layout.host);
    if (!rank_raw.empty() || !host_raw.empty()) {
      auto rank = parse_u64(rank_raw);
      if (!rank || *rank == 0 || host_raw.empty()) {
        ++stats.malformed;
        continue;
      }
      rec.click = Click{static_cast<uint32_t>(*rank), std::string(host_raw)};
    }

    ++stats.records;
    sink(std::move(rec));
  }
  if (in.bad()) throw DataError("I/O error while reading log stream");
}

std::vector<QueryRecord> parse_log(std::istream& in, LogFormat format, ParseStats& stats) {
  std::vector<QueryRecord> records;
  parse_log(in, format, [&](QueryRecord&& rec) { records.push_back(std::move(rec)); }, stats);
  return records;
}

void sort_records(std::vector<QueryRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const QueryRecord& a, const QueryRecord& b) {
                     if (a.user_id != b.user_id) return a.user_id < b.user_id;
                     return a.timestamp < b.timestamp;
                   });
}

std::map<std::string, uint64_t> load_result_counts(std::istream& in) {
  std::map<std::string, uint64_t> counts;
  std::vector<std::string> conflicts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields = split_tabs(line);
    if (fields.size() != 2) throw DataError("counts file: expected `query<TAB>count`: " + line);
    std::string key = normalize_query(fields[0]);
    auto value = parse_u64(fields[1]);
    if (key.empty() || !value) throw DataError("counts file: bad row: " + line);
    auto [it, inserted] = counts.emplace(key, *value);
    if (!inserted && it->second != *value) conflicts.push_back(key);
  }
  if (!conflicts.empty()) {
    std::sort(conflicts.begin(), conflicts.end());
    conflicts.erase(std::unique(conflicts.begin(), conflicts.end()), conflicts.end());
    throw ConfigError("counts file: conflicting duplicate keys: " + join(conflicts, ", "));
  }
  return counts;
}

void attach_result_counts(std::vector<QueryRecord>& records,
                          const std::map<std::string, uint64_t>& counts) {
  for (QueryRecord& rec : records) {
    if (rec.result_count) continue;
    auto it = counts.find(rec.query_norm);
    if (it != counts.end()) rec.result_count = it->second;
  }
}

namespace {

void check_tsv_safe(const std::string& field, const char* what) {
  if (field.find('\t') != std::string::npos || field.find('\n') != std::string::npos) {
    throw DataError(std::string(what) + " contains tab or newline");
  }
}

}  // namespace

void write_generic_tsv(std::ostream& out, const std::vector<QueryRecord>& records) {
  for (const QueryRecord& rec : records) {
    if (rec.user_id.empty()) throw DataError("record with empty user_id");
    check_tsv_safe(rec.user_id, "user_id");
    check_tsv_safe(rec.query, "query");
    out << rec.user_id << '\t' << rec.query << '\t' << rec.timestamp << '\t';
    if (rec.result_count) out << *rec.result_count;
    out << '\t';
    if (rec.click) {
      check_tsv_safe(rec.click->url_host, "click host");
      out << rec.click->rank << '\t' << rec.click->url_host;
    } else {
      out << '\t';
    }
    out << '\n';
  }
}

}  // namespace taxmine
