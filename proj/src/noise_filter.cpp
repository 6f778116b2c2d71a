#include "taxmine/noise_filter.hpp"

#include <algorithm>
#include <istream>
#include <map>

#include "taxmine/errors.hpp"
#include "taxmine/strings.hpp"

namespace taxmine {

NavigationalRules NavigationalRules::defaults() {
  NavigationalRules rules;
  rules.site_names = {
      "google",      "yahoo",       "wikipedia",  "myspace",    "ebay",
      "amazon",      "aol",         "msn",        "youtube",    "facebook",
      "hotmail",     "craigslist",  "mapquest",   "imdb",       "netflix",
      "walmart",     "target",      "bestbuy",    "sears",      "kmart",
      "expedia",     "travelocity", "orbitz",     "monster",    "careerbuilder",
      "paypal",      "citibank",    "chase",      "wachovia",   "fidelity",
      "espn",        "cnn",         "nytimes",    "foxnews",    "weather",
      "webmd",       "medline",     "usps",       "fedex",      "ups",
      "irs",         "nasa",        "pogo",       "miniclip",   "runescape",
      "neopets",     "friendster",  "xanga",      "livejournal","photobucket",
  };
  rules.domain_suffixes = {
      "com", "net",   "org",    "edu",   "gov",    "mil",    "info",
      "biz", "name",  "us",     "uk",    "ca",     "au",     "de",
      "fr",  "jp",    "co.uk",  "org.uk","ac.uk",  "com.au",
  };
  return rules;
}

std::set<std::string> load_rule_list(std::istream& in) {
  std::set<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string entry = normalize_query(line);
    if (!entry.empty()) entries.insert(entry);
  }
  return entries;
}

void SpamRules::validate() const {
  if (min_total_chars == 0 || max_term_chars == 0 || max_terms == 0 ||
      !(min_avg_gap_seconds > 0)) {
    throw ConfigError("spam rule thresholds must be positive");
  }
}

namespace {

bool is_ascii_letter(char c) { return c >= 'a' && c <= 'z'; }

bool term_has_domain_suffix(const std::string& term, const std::set<std::string>& suffixes) {
  for (const std::string& suffix : suffixes) {
    if (term.size() <= suffix.size()) continue;
    if (term.compare(term.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    char before = term[term.size() - suffix.size() - 1];
    if (is_ascii_letter(before) || before == '.') return true;
  }
  return false;
}

}  // namespace

bool is_navigational(const QueryRecord& q, const NavigationalRules& rules) {
  for (const std::string& marker : rules.url_markers) {
    if (q.query_norm.find(marker) != std::string::npos) return true;
  }
  std::vector<std::string> terms = split_terms(q.query_norm);
  for (const std::string& term : terms) {
    if (rules.site_names.count(term)) return true;
    if (term_has_domain_suffix(term, rules.domain_suffixes)) return true;
  }
  return false;
}

bool is_spam_query(const QueryRecord& q, const SpamRules& rules) {
  std::vector<std::string> terms = split_terms(q.query_norm);
  if (terms.size() > rules.max_terms) return true;
  size_t total_chars = 0;
  for (const std::string& term : terms) {
    if (term.size() > rules.max_term_chars) return true;
    total_chars += term.size();
  }
  return total_chars < rules.min_total_chars;
}

std::vector<Session> filter_sessions(std::vector<Session> sessions, const NavigationalRules* nav,
                                     const SpamRules* spam, bool gap_rule, FilterStats* stats) {
  FilterStats local;
  FilterStats& st = stats ? *stats : local;
  st.sessions_in += sessions.size();

  std::vector<Session> kept;
  kept.reserve(sessions.size());
  for (Session& session : sessions) {
    if (spam) {
      bool has_spam = std::any_of(session.records.begin(), session.records.end(),
                                  [&](const QueryRecord& r) { return is_spam_query(r, *spam); });
      if (has_spam) {
        ++st.sessions_dropped_spam;
        continue;
      }
    }
    if (nav) {
      size_t before = session.records.size();
      std::erase_if(session.records,
                    [&](const QueryRecord& r) { return is_navigational(r, *nav); });
      st.nav_queries_removed += before - session.records.size();
    }
    if (session.records.empty()) {
      ++st.sessions_dropped_empty;
      continue;
    }
    kept.push_back(std::move(session));
  }

  if (gap_rule) {
    // The gap statistic is taken over each user's surviving submissions so a
    // second pass reproduces the same decisions.
    double threshold = spam ? spam->min_avg_gap_seconds : SpamRules{}.min_avg_gap_seconds;
    std::map<std::string, std::vector<int64_t>> times;
    for (const Session& session : kept) {
      auto& user_times = times[session.user_id];
      for (const QueryRecord& rec : session.records) user_times.push_back(rec.timestamp);
    }
    std::set<std::string> dropped_users;
    for (auto& [user, user_times] : times) {
      if (user_times.size() < 2) continue;
      std::sort(user_times.begin(), user_times.end());
      double avg = static_cast<double>(user_times.back() - user_times.front()) /
                   static_cast<double>(user_times.size() - 1);
      if (avg < threshold) dropped_users.insert(user);
    }
    if (!dropped_users.empty()) {
      st.users_dropped_fast += dropped_users.size();
      size_t before = kept.size();
      std::erase_if(kept,
                    [&](const Session& s) { return dropped_users.count(s.user_id) != 0; });
      st.sessions_dropped_fast += before - kept.size();
    }
  }

  st.sessions_out += kept.size();
  return kept;
}

}  // namespace taxmine
