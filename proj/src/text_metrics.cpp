#include "taxmine/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "taxmine/strings.hpp"

namespace taxmine {

CountVector make_count_vector(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  CountVector out;
  for (auto& item : items) {
    if (!out.empty() && out.back().first == item) {
      ++out.back().second;
    } else {
      out.emplace_back(std::move(item), 1);
    }
  }
  return out;
}

CountVector char_3grams(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("char_3grams: empty string");
  std::vector<std::string> grams;
  if (s.size() < 3) {
    grams.emplace_back(s);
  } else {
    grams.reserve(s.size() - 2);
    for (size_t i = 0; i + 3 <= s.size(); ++i) grams.emplace_back(s.substr(i, 3));
  }
  return make_count_vector(std::move(grams));
}

double cosine(const CountVector& a, const CountVector& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("cosine: empty vector");
  double dot = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int cmp = a[i].first.compare(b[j].first);
    if (cmp == 0) {
      dot += static_cast<double>(a[i].second) * b[j].second;
      ++i;
      ++j;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  double na = 0, nb = 0;
  for (const auto& [_, c] : a) na += static_cast<double>(c) * c;
  for (const auto& [_, c] : b) nb += static_cast<double>(c) * c;
  // One sqrt over the product keeps cosine(v, v) at exactly 1.0.
  double value = dot / std::sqrt(na * nb);
  if (value > 1.0) value = 1.0;
  if (value < 0.0) value = 0.0;
  return value;
}

double jaccard(const TermSet& a, const TermSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  size_t inter = overlap(a, b);
  size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t overlap(const TermSet& a, const TermSet& b) {
  const TermSet& small = a.size() <= b.size() ? a : b;
  const TermSet& large = a.size() <= b.size() ? b : a;
  size_t n = 0;
  for (const auto& item : small) n += large.count(item);
  return n;
}

std::string soundex(std::string_view term) {
  //                          a    b    c    d    e    f    g    h    i    j    k    l    m
  static const char kCode[] = {'0', '1', '2', '3', '0', '1', '2', '0', '0', '2', '2', '4', '5',
                               //  n    o    p    q    r    s    t    u    v    w    x    y    z
                               '5', '0', '1', '2', '6', '2', '3', '0', '1', '0', '2', '0', '2'};
  std::string letters;
  for (char c : term) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c >= 'a' && c <= 'z') letters.push_back(c);
  }
  if (letters.empty()) return "0000";

  std::string out(1, static_cast<char>(letters[0] - 'a' + 'A'));
  char last = kCode[letters[0] - 'a'];
  for (size_t i = 1; i < letters.size() && out.size() < 4; ++i) {
    char c = letters[i];
    if (c == 'h' || c == 'w') continue;  // transparent: same codes across h/w merge
    char code = kCode[c - 'a'];
    if (code == '0') {  // vowels (and y) separate equal codes
      last = '0';
      continue;
    }
    if (code != last) out.push_back(code);
    last = code;
  }
  out.append(4 - out.size(), '0');
  return out;
}

namespace {

// Porter (1980) suffix stripping over a lowercase a-z word.
class PorterStemmer {
 public:
  std::string run(std::string word) {
    w_ = std::move(word);
    if (w_.size() <= 2) return w_;
    k_ = static_cast<int>(w_.size()) - 1;
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    w_.resize(static_cast<size_t>(k_) + 1);
    return w_;
  }

 private:
  std::string w_;
  int k_ = 0;  // index of last live char
  int j_ = 0;  // index of last char of the stem when a suffix matched

  bool consonant(int i) const {
    char c = w_[static_cast<size_t>(i)];
    switch (c) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of vowel-consonant sequences in w_[0..j].
  int measure(int j) const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j) return n;
      if (!consonant(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j) return n;
        if (consonant(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j) return n;
        if (!consonant(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(int j) const {
    if (j < 1) return false;
    if (w_[static_cast<size_t>(j)] != w_[static_cast<size_t>(j - 1)]) return false;
    return consonant(j);
  }

  // consonant-vowel-consonant ending at i, last consonant not w, x or y
  bool cvc(int i) const {
    if (i < 2 || !consonant(i) || consonant(i - 1) || !consonant(i - 2)) return false;
    char c = w_[static_cast<size_t>(i)];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(const char* s) {
    int len = static_cast<int>(std::strlen(s));
    if (len > k_ + 1) return false;
    if (w_.compare(static_cast<size_t>(k_ - len + 1), static_cast<size_t>(len), s) != 0) return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(const char* s) {
    int len = static_cast<int>(std::strlen(s));
    w_.replace(static_cast<size_t>(j_ + 1), w_.size() - static_cast<size_t>(j_ + 1), s);
    k_ = j_ + len;
  }

  void replace_if_measure(const char* repl) {
    if (measure(j_) > 0) set_to(repl);
  }

  void step1ab() {
    if (w_[static_cast<size_t>(k_)] == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (k_ >= 1 && w_[static_cast<size_t>(k_ - 1)] != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (measure(j_) > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(k_)) {
        char c = w_[static_cast<size_t>(k_)];
        if (c != 'l' && c != 's' && c != 'z') --k_;
      } else if (measure(k_) == 1 && cvc(k_)) {
        j_ = k_;
        set_to("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) w_[static_cast<size_t>(k_)] = 'i';
  }

  void step2() {
    static const std::pair<const char*, const char*> kRules[] = {
        {"ational", "ate"}, {"ization", "ize"}, {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"biliti", "ble"},  {"tional", "tion"}, {"entli", "ent"},
        {"ousli", "ous"},   {"alism", "al"},    {"aliti", "al"},    {"iviti", "ive"},
        {"ation", "ate"},   {"enci", "ence"},   {"anci", "ance"},   {"izer", "ize"},
        {"abli", "able"},   {"alli", "al"},     {"ator", "ate"},    {"eli", "e"},
    };
    for (const auto& [suffix, repl] : kRules) {
      if (ends(suffix)) {
        replace_if_measure(repl);
        return;
      }
    }
  }

  void step3() {
    static const std::pair<const char*, const char*> kRules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ness", ""},  {"ful", ""},
    };
    for (const auto& [suffix, repl] : kRules) {
      if (ends(suffix)) {
        replace_if_measure(repl);
        return;
      }
    }
  }

  void step4() {
    static const char* kSuffixes[] = {"ement", "ance", "ence", "able", "ible", "ment",
                                      "ant",   "ent",  "ion",  "ism",  "ate",  "iti",
                                      "ous",   "ive",  "ize",  "al",   "er",   "ic",
                                      "ou"};
    for (const char* suffix : kSuffixes) {
      if (!ends(suffix)) continue;
      if (std::strcmp(suffix, "ion") == 0) {
        char c = j_ >= 0 ? w_[static_cast<size_t>(j_)] : '\0';
        if (c != 's' && c != 't') return;
      }
      if (measure(j_) > 1) k_ = j_;
      return;
    }
  }

  void step5() {
    // 5a
    if (w_[static_cast<size_t>(k_)] == 'e') {
      int m = measure(k_ - 1);
      if (m > 1 || (m == 1 && !cvc(k_ - 1))) --k_;
    }
    // 5b
    if (w_[static_cast<size_t>(k_)] == 'l' && double_consonant(k_) && measure(k_) > 1) --k_;
  }
};

bool all_lower_alpha(std::string_view word) {
  for (char c : word)
    if (c < 'a' || c > 'z') return false;
  return !word.empty();
}

}  // namespace

std::string stem(std::string_view text) {
  std::vector<std::string> words = split_terms(text);
  if (words.empty()) return std::string(text);
  PorterStemmer stemmer;
  for (auto& word : words) {
    if (all_lower_alpha(word)) word = stemmer.run(std::move(word));
  }
  return join(words, " ");
}

std::vector<TermGram> term_ngrams(std::string_view normalized_query) {
  std::vector<std::string> terms = split_terms(normalized_query);
  std::vector<TermGram> out;
  size_t k = terms.size();
  out.reserve(k * (k + 1) / 2);
  for (size_t length = 1; length <= k; ++length) {
    for (size_t start = 0; start + length <= k; ++start) {
      std::string text = terms[start];
      for (size_t i = 1; i < length; ++i) {
        text.push_back(' ');
        text.append(terms[start + i]);
      }
      out.push_back(TermGram{std::move(text), static_cast<uint32_t>(start),
                             static_cast<uint32_t>(length)});
    }
  }
  return out;
}

}  // namespace taxmine
