#include "claimtree/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "claimtree/error.hpp"
#include "claimtree/text.hpp"

namespace claimtree {

using nlohmann::json;

std::string make_segment_id(const std::string& doc_id, std::size_t start, std::size_t end) {
  return doc_id + "#" + std::to_string(start) + "-" + std::to_string(end);
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open corpus file " + path.string());

  std::vector<Document> docs;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::normalize_whitespace(line).empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::UnreadableFile, "line " + std::to_string(line_no) +
                                                 " is not valid JSON (" + where + ")");
    }
    if (!record.is_object()) {
      throw Error(ErrorCode::UnreadableFile,
                  "line " + std::to_string(line_no) + " is not a JSON object (" + where + ")");
    }
    if (!record.contains("doc_id") || !record["doc_id"].is_string() ||
        record["doc_id"].get<std::string>().empty()) {
      throw Error(ErrorCode::MissingField, "record at " + where + " has no doc_id");
    }
    Document doc;
    doc.doc_id = record["doc_id"].get<std::string>();
    for (const char* field : {"title", "text"}) {
      if (!record.contains(field) || !record[field].is_string()) {
        throw Error(ErrorCode::MissingField,
                    "record " + doc.doc_id + " (" + where + ") is missing field '" + field + "'");
      }
    }
    doc.title = record["title"].get<std::string>();
    doc.text = record["text"].get<std::string>();
    if (text::normalize_whitespace(doc.text).empty()) {
      throw Error(ErrorCode::MissingField,
                  "record " + doc.doc_id + " (" + where + ") has empty text");
    }
    if (!seen.insert(doc.doc_id).second) {
      throw Error(ErrorCode::DuplicateDocId,
                  "doc_id " + doc.doc_id + " repeated at " + where);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Sentence> split_document(const Document& doc) {
  std::vector<Sentence> out;
  auto parts = text::split_sentences(doc.text);
  out.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    Sentence s;
    s.doc_id = doc.doc_id;
    s.index = i;
    s.terms = text::index_terms(parts[i]);
    s.text = std::move(parts[i]);
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

Segment make_segment(const std::string& doc_id, const std::vector<Sentence>& sentences,
                     std::size_t start, std::size_t end) {
  Segment seg;
  seg.doc_id = doc_id;
  seg.start = start;
  seg.end = end;
  seg.segment_id = make_segment_id(doc_id, start, end);
  for (std::size_t i = start; i <= end; ++i) {
    if (i > start) seg.text.push_back(' ');
    seg.text += sentences[i].text;
  }
  return seg;
}

// 2-D prefix sums for O(1) square-block sums.
class BlockSums {
 public:
  explicit BlockSums(const c99::Matrix& m) : n_(m.size()), sums_((n_ + 1) * (n_ + 1), 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        at(i + 1, j + 1) = m[i][j] + at(i, j + 1) + at(i + 1, j) - at(i, j);
      }
    }
  }

  // Sum over rows and columns [begin, end).
  double block(std::size_t begin, std::size_t end) const {
    return at(end, end) - at(begin, end) - at(end, begin) + at(begin, begin);
  }

 private:
  double& at(std::size_t i, std::size_t j) { return sums_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return sums_[i * (n_ + 1) + j]; }

  std::size_t n_;
  std::vector<double> sums_;
};

double inside_density(const BlockSums& sums, const std::vector<std::size_t>& cuts) {
  // cuts: 0 = c_0 < c_1 < ... < c_k = n
  double inside = 0.0;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    inside += sums.block(cuts[k], cuts[k + 1]);
    double len = static_cast<double>(cuts[k + 1] - cuts[k]);
    area += len * len;
  }
  return area > 0.0 ? inside / area : 0.0;
}

}  // namespace

namespace c99 {

Matrix similarity_matrix(const std::vector<Sentence>& sentences) {
  const std::size_t n = sentences.size();
  std::vector<std::unordered_map<std::string, double>> vecs(n);
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : sentences[i].terms) vecs[i][t] += 1.0;
    for (const auto& [t, c] : vecs[i]) norms[i] += c * c;
    norms[i] = std::sqrt(norms[i]);
  }
  Matrix sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (norms[i] == 0.0 || norms[j] == 0.0) continue;
      const auto& small = vecs[i].size() <= vecs[j].size() ? vecs[i] : vecs[j];
      const auto& large = vecs[i].size() <= vecs[j].size() ? vecs[j] : vecs[i];
      double dot = 0.0;
      for (const auto& [t, c] : small) {
        auto it = large.find(t);
        if (it != large.end()) dot += c * it->second;
      }
      sim[i][j] = sim[j][i] = dot / (norms[i] * norms[j]);
    }
  }
  return sim;
}

Matrix rank_matrix(const Matrix& similarity, std::size_t mask_size) {
  const std::size_t n = similarity.size();
  const std::size_t radius = mask_size / 2;
  Matrix ranks(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r0 = i >= radius ? i - radius : 0;
    const std::size_t r1 = std::min(n - 1, i + radius);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t c0 = j >= radius ? j - radius : 0;
      const std::size_t c1 = std::min(n - 1, j + radius);
      std::size_t lower = 0;
      std::size_t examined = 0;
      for (std::size_t a = r0; a <= r1; ++a) {
        for (std::size_t b = c0; b <= c1; ++b) {
          if (a == i && b == j) continue;
          ++examined;
          if (similarity[a][b] < similarity[i][j]) ++lower;
        }
      }
      ranks[i][j] = examined ? static_cast<double>(lower) / static_cast<double>(examined) : 0.0;
    }
    // Self-similarity says nothing about cohesion and biases the density toward tiny segments.
    ranks[i][i] = 0.0;
  }
  return ranks;
}

std::vector<std::size_t> boundaries(const Matrix& ranks, const C99Params& params) {
  const std::size_t n = ranks.size();
  const std::size_t min_len = std::max<std::size_t>(1, params.min_segment_sentences);
  BlockSums sums(ranks);

  std::vector<std::size_t> cuts{0, n};
  double density = inside_density(sums, cuts);
  while (params.max_segments == 0 || cuts.size() - 1 < params.max_segments) {
    std::size_t best_pos = 0;
    double best_density = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      for (std::size_t p = cuts[k] + min_len; p + min_len <= cuts[k + 1]; ++p) {
        auto trial = cuts;
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(k) + 1, p);
        double d = inside_density(sums, trial);
        if (d > best_density) {
          best_density = d;
          best_pos = p;
        }
      }
    }
    if (best_pos == 0) break;

    double gain;
    if (density > 0.0) {
      gain = (best_density - density) / density;
    } else {
      gain = best_density > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    if (gain < params.min_relative_gain) break;

    cuts.insert(std::upper_bound(cuts.begin(), cuts.end(), best_pos), best_pos);
    density = best_density;
  }
  return {cuts.begin() + 1, cuts.end() - 1};
}

}  // namespace c99

std::vector<Segment> segment_sentences(const std::string& doc_id,
                                       const std::vector<Sentence>& sentences,
                                       const C99Params& params) {
  if (sentences.empty()) throw Error(ErrorCode::EmptyDocument, "document " + doc_id + " has no sentences");
  auto ranks = c99::rank_matrix(c99::similarity_matrix(sentences), params.mask_size);
  auto cuts = c99::boundaries(ranks, params);
  cuts.push_back(sentences.size());

  std::vector<Segment> out;
  std::size_t start = 0;
  for (std::size_t cut : cuts) {
    out.push_back(make_segment(doc_id, sentences, start, cut - 1));
    start = cut;
  }
  return out;
}

std::vector<Segment> segment_document(const Document& doc, const C99Params& params) {
  return segment_sentences(doc.doc_id, split_document(doc), params);
}

std::vector<Segment> segment_fixed_window(const std::string& doc_id,
                                          const std::vector<Sentence>& sentences,
                                          std::size_t window) {
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
  if (sentences.empty()) throw Error(ErrorCode::EmptyDocument, "document " + doc_id + " has no sentences");
  std::vector<Segment> out;
  for (std::size_t start = 0; start < sentences.size(); start += window) {
    std::size_t end = std::min(sentences.size(), start + window) - 1;
    out.push_back(make_segment(doc_id, sentences, start, end));
  }
  return out;
}

std::vector<Segment> segment_fixed_window(const Document& doc, std::size_t window) {
  return segment_fixed_window(doc.doc_id, split_document(doc), window);
}

void write_segment_store(const std::filesystem::path& path, const std::vector<Segment>& segments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  for (const auto& s : segments) {
    nlohmann::ordered_json rec;
    rec["segment_id"] = s.segment_id;
    rec["doc_id"] = s.doc_id;
    rec["start"] = s.start;
    rec["end"] = s.end;
    rec["text"] = s.text;
    out << rec.dump() << '\n';
  }
}

std::vector<Segment> read_segment_store(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open segment store " + path.string());
  std::vector<Segment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto rec = json::parse(line);
      Segment s;
      s.segment_id = rec.at("segment_id").get<std::string>();
      s.doc_id = rec.at("doc_id").get<std::string>();
      s.start = rec.at("start").get<std::size_t>();
      s.end = rec.at("end").get<std::size_t>();
      s.text = rec.at("text").get<std::string>();
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::UnreadableFile, path.string() + " line " + std::to_string(line_no) +
                                                 ": " + e.what());
    }
  }
  return out;
}

SegmentMap to_segment_map(const std::vector<Segment>& segments) {
  SegmentMap out;
  for (const auto& s : segments) out.emplace(s.segment_id, s);
  return out;
}

}  // namespace claimtree
