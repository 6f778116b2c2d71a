#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace taxmine {

// Sparse count vector; keys sorted and unique, counts >= 1.
using CountVector = std::vector<std::pair<std::string, int>>;

CountVector make_count_vector(std::vector<std::string> items);

// Sliding character 3-grams over the normalized string, interior spaces
// included, no start/end padding. Strings shorter than 3 characters yield a
// single gram equal to the whole string. Throws std::invalid_argument on "".
CountVector char_3grams(std::string_view s);

// Cosine over count vectors; identical vectors give exactly 1.0.
// Throws std::invalid_argument when either vector is empty.
double cosine(const CountVector& a, const CountVector& b);

using TermSet = std::set<std::string>;

// |a n b| / |a u b|; 0.0 when both sets are empty.
double jaccard(const TermSet& a, const TermSet& b);
std::size_t overlap(const TermSet& a, const TermSet& b);

// American Soundex with H/W transparency: first letter plus three digits.
// Non-letter bytes are ignored; inputs without any ASCII letter map to "0000".
std::string soundex(std::string_view term);

// Porter suffix stripping. Multi-word input is stemmed word by word and
// rejoined with single spaces; words with non a-z bytes pass through.
std::string stem(std::string_view text);

struct TermGram {
  std::string text;
  uint32_t start = 0;   // term offset in the query
  uint32_t length = 0;  // gram size in terms
  bool operator==(const TermGram&) const = default;
};

// Every contiguous term n-gram of the query: k terms yield k*(k+1)/2 grams,
// ordered by length, then start offset.
std::vector<TermGram> term_ngrams(std::string_view normalized_query);

}  // namespace taxmine
