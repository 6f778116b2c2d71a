#pragma once

#include <array>
#include <iosfwd>

#include "taxmine/indexer.hpp"

namespace taxmine {

inline constexpr std::size_t kFeatureCount = 27;

using FeatureVector = std::array<double, kFeatureCount>;

// Column names for the feature dump, aligned with FeatureVector slots.
const std::array<std::string_view, kFeatureCount>& feature_names();

// 27 lexical, phonetic, temporal and session features for an ordered query
// pair. Slots 12-14 are the Soundex-code cosine/Jaccard/overlap replacements
// for the stemmed-term similarities. Every value is finite.
FeatureVector compute_features(const QueryRecord& q1, const QueryRecord& q2,
                               const PairSessionContext& ctx);

struct FeatureRow {
  std::string q1;
  std::string q2;
  FeatureVector values;
};

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows);

}  // namespace taxmine
