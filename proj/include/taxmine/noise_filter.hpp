#pragma once

#include <iosfwd>
#include <set>

#include "taxmine/sessionizer.hpp"

namespace taxmine {

struct NavigationalRules {
  std::set<std::string> site_names;
  std::set<std::string> domain_suffixes;
  std::set<std::string> url_markers{"www.", "http://", "https://"};
  // Built-in editable lists (50 site names, common domain suffixes).
  static NavigationalRules defaults();
};

// One entry per line; `#` starts a comment. Entries are lowercased.
std::set<std::string> load_rule_list(std::istream& in);

struct SpamRules {
  uint32_t min_total_chars = 3;
  uint32_t max_term_chars = 25;
  uint32_t max_terms = 5;
  double min_avg_gap_seconds = 7.0;
  void validate() const;
};

// True when the query names a site, a term carries a domain suffix (preceded
// by a letter or dot), or a URL marker appears anywhere.
bool is_navigational(const QueryRecord& q, const NavigationalRules& rules);

// True when total non-space chars < 3, any term longer than 25, or more than
// 5 terms.
bool is_spam_query(const QueryRecord& q, const SpamRules& rules);

struct FilterStats {
  uint64_t sessions_in = 0;
  uint64_t sessions_out = 0;
  uint64_t sessions_dropped_spam = 0;
  uint64_t nav_queries_removed = 0;
  uint64_t sessions_dropped_empty = 0;
  uint64_t users_dropped_fast = 0;
  uint64_t sessions_dropped_fast = 0;
};

// Drops sessions containing a spam query, strips navigational queries, drops
// emptied sessions, then drops every session of users whose mean gap between
// surviving submissions is under the threshold. Null rules (or gap_rule set
// to false) disable the corresponding sub-filter. Idempotent.
std::vector<Session> filter_sessions(std::vector<Session> sessions, const NavigationalRules* nav,
                                     const SpamRules* spam, bool gap_rule = true,
                                     FilterStats* stats = nullptr);

}  // namespace taxmine
