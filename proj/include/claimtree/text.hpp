#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace claimtree::text {

// Lowercased word tokens. ASCII letters/digits and all non-ASCII bytes are word
// characters; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view input);

// Fixed English stopword list shipped with the library.
bool is_stopword(std::string_view lowercase_token);

// Porter (1980) suffix-stripping stemmer. Expects a lowercase ASCII word;
// words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

// tokenize -> drop stopwords, single characters and pure numbers -> stem.
std::vector<std::string> index_terms(std::string_view input);

// Rule-based sentence splitter: terminal punctuation followed by whitespace,
// guarded by an abbreviation list, plus paragraph breaks. Returned sentences are
// trimmed with internal whitespace collapsed.
std::vector<std::string> split_sentences(std::string_view input);

// Collapses every whitespace run to one space and trims both ends.
std::string normalize_whitespace(std::string_view input);

}  // namespace claimtree::text
