#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace claimtree {

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;
  std::vector<std::string> terms;  // stemmed, stopword-filtered
};

struct Segment {
  std::string segment_id;  // "doc_id#start-end"
  std::string doc_id;
  std::size_t start = 0;   // first sentence index
  std::size_t end = 0;     // last sentence index, inclusive
  std::string text;

  bool is_short(std::size_t min_chars) const { return text.size() < min_chars; }
};

std::string make_segment_id(const std::string& doc_id, std::size_t start, std::size_t end);

// Reads one JSON record per line ({doc_id, title, text}). Blank lines are skipped.
// Throws Error(UnreadableFile | MissingField | DuplicateDocId) naming the record.
std::vector<Document> load_corpus(const std::filesystem::path& path);

std::vector<Sentence> split_document(const Document& doc);

struct C99Params {
  std::size_t mask_size = 11;        // rank-transform window (odd)
  double min_relative_gain = 0.05;   // stop when density gain falls below this
  std::size_t min_segment_sentences = 2;
  std::size_t max_segments = 0;      // 0 = unbounded
};

// Divisive C99 segmentation over sentence term vectors. Output tiles the
// document's sentences. Throws Error(EmptyDocument).
std::vector<Segment> segment_document(const Document& doc, const C99Params& params = {});

// Same, on pre-split sentences.
std::vector<Segment> segment_sentences(const std::string& doc_id,
                                       const std::vector<Sentence>& sentences,
                                       const C99Params& params = {});

// Consecutive non-overlapping windows; the last one may be short.
std::vector<Segment> segment_fixed_window(const Document& doc, std::size_t window);

std::vector<Segment> segment_fixed_window(const std::string& doc_id,
                                          const std::vector<Sentence>& sentences,
                                          std::size_t window);

namespace c99 {

// Exposed for inspection and tests.
using Matrix = std::vector<std::vector<double>>;

Matrix similarity_matrix(const std::vector<Sentence>& sentences);
Matrix rank_matrix(const Matrix& similarity, std::size_t mask_size);

// Sentence indices where a new segment starts (never includes 0), ascending.
std::vector<std::size_t> boundaries(const Matrix& ranks, const C99Params& params);

}  // namespace c99

// Segment store: one JSON record per line {segment_id, doc_id, start, end, text}.
void write_segment_store(const std::filesystem::path& path, const std::vector<Segment>& segments);
std::vector<Segment> read_segment_store(const std::filesystem::path& path);

// segment_id -> segment
using SegmentMap = std::map<std::string, Segment>;
SegmentMap to_segment_map(const std::vector<Segment>& segments);

}  // namespace claimtree
