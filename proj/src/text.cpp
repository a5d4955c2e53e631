#include "claimtree/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace claimtree::text {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
      "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being", "below",
      "between", "both", "but", "by", "can", "could", "couldn", "did", "didn", "do", "does",
      "doesn", "doing", "don", "down", "during", "each", "either", "etc", "few", "for", "from",
      "further", "had", "hadn", "has", "hasn", "have", "haven", "having", "he", "her", "here",
      "hers", "herself", "him", "himself", "his", "how", "however", "i", "if", "in", "into",
      "is", "isn", "it", "its", "itself", "just", "ll", "may", "me", "might", "more", "most",
      "must", "my", "myself", "neither", "no", "nor", "not", "now", "of", "off", "on", "once",
      "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "re", "same",
      "shall", "she", "should", "shouldn", "so", "some", "such", "than", "that", "the", "their",
      "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
      "through", "thus", "to", "too", "under", "until", "up", "upon", "us", "ve", "very", "was",
      "wasn", "we", "were", "weren", "what", "when", "where", "whether", "which", "while", "who",
      "whom", "why", "will", "with", "within", "without", "won", "would", "wouldn", "yet", "you",
      "your", "yours", "yourself", "yourselves"};
  return kWords;
}

const std::unordered_set<std::string_view>& abbreviations() {
  static const std::unordered_set<std::string_view> kAbbrev = {
      "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "al",
      "fig", "figs", "eq", "eqs", "no", "nos", "vol", "approx", "ca", "cf", "inc", "ltd",
      "co", "corp", "dept", "univ", "u.s", "u.k", "ph.d", "resp", "ref", "refs", "sec",
      "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec"};
  return kAbbrev;
}

// --- Porter stemmer -------------------------------------------------------

class Stemmer {
 public:
  explicit Stemmer(std::string word) : w_(std::move(word)) {}

  std::string run() {
    if (w_.size() <= 2) return w_;
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !consonant(i - 1);
      default: return true;
    }
  }

  // Number of VC sequences in w_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // cvc where the final c is not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return w_.size() >= s.size() && std::string_view(w_).substr(w_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace_suffix(std::string_view suffix, std::string_view with) {
    w_.replace(w_.size() - suffix.size(), suffix.size(), with);
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  // Longest (first listed) matching suffix wins; its condition decides.
  template <std::size_t N, typename Cond>
  void apply_rules(const std::array<Rule, N>& rules, Cond cond) {
    for (const auto& r : rules) {
      if (ends(r.suffix)) {
        if (cond(stem_len(r.suffix), r.suffix)) replace_suffix(r.suffix, r.replacement);
        return;
      }
    }
  }

  void step1a() {
    if (ends("sses")) replace_suffix("sses", "ss");
    else if (ends("ies")) replace_suffix("ies", "i");
    else if (ends("ss")) return;
    else if (ends("s")) replace_suffix("s", "");
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace_suffix("eed", "ee");
      return;
    }
    bool stripped = false;
    if (ends("ed") && has_vowel(stem_len("ed"))) {
      replace_suffix("ed", "");
      stripped = true;
    } else if (ends("ing") && has_vowel(stem_len("ing"))) {
      replace_suffix("ing", "");
      stripped = true;
    }
    if (!stripped) return;
    if (ends("at")) replace_suffix("at", "ate");
    else if (ends("bl")) replace_suffix("bl", "ble");
    else if (ends("iz")) replace_suffix("iz", "ize");
    else if (double_consonant(w_.size())) {
      char c = w_.back();
      if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
      w_.push_back('e');
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) w_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<Rule, 20> kRules{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},      {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"},  {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},  {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},    {"biliti", "ble"},
    }};
    apply_rules(kRules, [this](std::size_t len, std::string_view) { return measure(len) > 0; });
  }

  void step3() {
    static constexpr std::array<Rule, 7> kRules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    apply_rules(kRules, [this](std::size_t len, std::string_view) { return measure(len) > 0; });
  }

  void step4() {
    static constexpr std::array<Rule, 19> kRules{{
        {"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},
        {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
        {"ent", ""},  {"ion", ""},  {"ou", ""},   {"ism", ""}, {"ate", ""},
        {"iti", ""},  {"ous", ""},  {"ive", ""},  {"ize", ""},
    }};
    apply_rules(kRules, [this](std::size_t len, std::string_view suffix) {
      if (measure(len) <= 1) return false;
      if (suffix == "ion") return len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't');
      return true;
    });
  }

  void step5a() {
    if (!ends("e")) return;
    std::size_t len = stem_len("e");
    int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
  }

  std::string w_;
};

}  // namespace

std::vector<std::string> tokenize(std::string_view input) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : input) {
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_stopword(std::string_view lowercase_token) {
  return stopwords().contains(lowercase_token);
}

std::string porter_stem(std::string_view word) { return Stemmer(std::string(word)).run(); }

std::vector<std::string> index_terms(std::string_view input) {
  std::vector<std::string> terms;
  for (auto& tok : tokenize(input)) {
    if (tok.size() < 2 || is_stopword(tok)) continue;
    if (std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
      continue;
    }
    bool ascii = std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return c < 0x80; });
    terms.push_back(ascii ? porter_stem(tok) : tok);
  }
  return terms;
}

std::string normalize_whitespace(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  bool pending_space = false;
  for (unsigned char c : input) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view input) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string s = normalize_whitespace(input.substr(start, end - start));
    if (!s.empty()) sentences.push_back(std::move(s));
    start = end;
  };

  const std::size_t n = input.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = input[i];

    // Paragraph break: newline, optional blanks, newline.
    if (c == '\n') {
      std::size_t j = i + 1;
      while (j < n && (input[j] == ' ' || input[j] == '\t' || input[j] == '\r')) ++j;
      if (j < n && input[j] == '\n') {
        flush(i);
        i = j + 1;
        continue;
      }
    }

    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }

    std::size_t end = i + 1;
    while (end < n && (input[end] == '.' || input[end] == '!' || input[end] == '?')) ++end;
    while (end < n && (input[end] == '"' || input[end] == '\'' || input[end] == ')' ||
                       input[end] == ']')) {
      ++end;
    }
    if (end < n && !is_space(static_cast<unsigned char>(input[end]))) {
      i = end;
      continue;
    }

    bool split = true;
    if (c == '.') {
      std::size_t w = i;
      while (w > start && !is_space(static_cast<unsigned char>(input[w - 1]))) --w;
      std::string word;
      for (std::size_t k = w; k < i; ++k) {
        unsigned char ch = input[k];
        if (ch == '(' || ch == '[' || ch == '"' || ch == '\'') continue;
        word.push_back(static_cast<char>(std::tolower(ch)));
      }
      if (abbreviations().contains(word)) split = false;
    }
    if (split) {
      std::size_t next = end;
      while (next < n && is_space(static_cast<unsigned char>(input[next]))) ++next;
      if (next < n && std::islower(static_cast<unsigned char>(input[next]))) split = false;
    }

    if (split) flush(end);
    i = end;
  }
  flush(n);
  return sentences;
}

}  // namespace claimtree::text
