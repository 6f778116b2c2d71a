#include "taxmine/features.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "taxmine/strings.hpp"
#include "taxmine/text_metrics.hpp"

namespace taxmine {

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "q1_terms",          "q2_terms",        "term_delta",      "q1_chars",
      "q2_chars",          "char_delta",      "term_jaccard",    "term_overlap",
      "char3_cosine",      "levenshtein_norm","prefix_norm",     "substring",
      "soundex_cosine",    "soundex_jaccard", "soundex_overlap", "time_delta",
      "geometric_y",       "same_half_hour",  "q1_pos",          "q2_pos",
      "session_len",       "between",         "q1_clicks",       "q2_clicks",
      "avg_clicks_begin",  "count_ratio_log10", "pair_sessions",
  };
  return names;
}

namespace {

size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

size_t common_prefix_chars(std::string_view a, std::string_view b) {
  size_t n = std::min(a.size(), b.size());
  size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

bool contiguous_subsequence(const std::vector<std::string>& needle,
                            const std::vector<std::string>& haystack) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool match = true;
    for (size_t i = 0; i < needle.size(); ++i) {
      if (haystack[start + i] != needle[i]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

constexpr int64_t kHalfHourSeconds = 1800;

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

FeatureVector compute_features(const QueryRecord& q1, const QueryRecord& q2,
                               const PairSessionContext& ctx) {
  FeatureVector f{};
  const std::string& n1 = q1.query_norm;
  const std::string& n2 = q2.query_norm;
  std::vector<std::string> t1 = split_terms(n1);
  std::vector<std::string> t2 = split_terms(n2);
  TermSet s1(t1.begin(), t1.end());
  TermSet s2(t2.begin(), t2.end());

  f[0] = static_cast<double>(t1.size());
  f[1] = static_cast<double>(t2.size());
  f[2] = f[1] - f[0];
  f[3] = static_cast<double>(n1.size());
  f[4] = static_cast<double>(n2.size());
  f[5] = f[4] - f[3];
  f[6] = jaccard(s1, s2);
  f[7] = static_cast<double>(overlap(s1, s2));
  f[8] = cosine(char_3grams(n1), char_3grams(n2));
  double max_len = static_cast<double>(std::max(n1.size(), n2.size()));
  f[9] = max_len > 0 ? static_cast<double>(levenshtein(n1, n2)) / max_len : 0.0;
  f[10] = max_len > 0 ? static_cast<double>(common_prefix_chars(n1, n2)) / max_len : 0.0;
  f[11] = (n1 == n2 || contiguous_subsequence(t1, t2) || contiguous_subsequence(t2, t1)) ? 1.0 : 0.0;

  std::vector<std::string> codes1, codes2;
  codes1.reserve(t1.size());
  codes2.reserve(t2.size());
  for (const auto& term : t1) codes1.push_back(soundex(term));
  for (const auto& term : t2) codes2.push_back(soundex(term));
  TermSet cs1(codes1.begin(), codes1.end());
  TermSet cs2(codes2.begin(), codes2.end());
  f[12] = cosine(make_count_vector(std::move(codes1)), make_count_vector(std::move(codes2)));
  f[13] = jaccard(cs1, cs2);
  f[14] = static_cast<double>(overlap(cs1, cs2));

  int64_t dt = q2.timestamp - q1.timestamp;
  f[15] = static_cast<double>(dt);
  int64_t abs_dt = dt >= 0 ? dt : -dt;
  f[16] = abs_dt >= kHalfHourSeconds
              ? 0.0
              : 1.0 - static_cast<double>(abs_dt) / static_cast<double>(kHalfHourSeconds);
  f[17] = floor_div(q1.timestamp, kHalfHourSeconds) == floor_div(q2.timestamp, kHalfHourSeconds)
              ? 1.0
              : 0.0;

  f[18] = static_cast<double>(ctx.q1_position);
  f[19] = static_cast<double>(ctx.q2_position);
  f[20] = static_cast<double>(ctx.session_length);
  uint32_t lo = std::min(ctx.q1_position, ctx.q2_position);
  uint32_t hi = std::max(ctx.q1_position, ctx.q2_position);
  f[21] = hi > lo ? static_cast<double>(hi - lo - 1) : 0.0;
  f[22] = static_cast<double>(ctx.clicks_q1);
  f[23] = static_cast<double>(ctx.clicks_q2);
  f[24] = ctx.avg_clicks_to_later;
  if (q1.result_count && q2.result_count && *q1.result_count > 0 && *q2.result_count > 0) {
    f[25] = std::log10(static_cast<double>(*q1.result_count) /
                       static_cast<double>(*q2.result_count));
  }
  f[26] = static_cast<double>(ctx.cooccurring_sessions);
  return f;
}

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
  out << "q1,q2";
  for (std::string_view name : feature_names()) out << ',' << name;
  out << '\n';
  for (const FeatureRow& row : rows) {
    out << '"' << row.q1 << "\",\"" << row.q2 << '"';
    for (double v : row.values) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace taxmine
