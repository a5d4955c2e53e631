#include "claimtree/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "claimtree/error.hpp"
#include "claimtree/hash.hpp"
#include "claimtree/http.hpp"
#include "claimtree/parallel.hpp"
#include "claimtree/text.hpp"

namespace claimtree {

using nlohmann::json;

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidArgument, "embedding vector is empty");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "embedding has a non-finite entry");
  }
}

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  EmbeddingVector v(std::move(values));
  double n = v.norm();
  if (n == 0.0) throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  for (double& x : v.values_) x /= n;
  return v;
}

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cosine of dims " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    na += x[i] * x[i];
    nb += y[i] * y[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroVector, "cosine with a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<EmbeddingVector> embed_texts(Embedder& embedder, const std::vector<std::string>& texts) {
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) {
      throw Error(ErrorCode::InvalidArgument, "text " + std::to_string(i) + " is empty");
    }
  }
  if (texts.empty()) return {};
  auto raw = embedder.embed_raw(texts);
  if (raw.size() != texts.size()) {
    throw Error(ErrorCode::DimensionMismatch, "provider returned " + std::to_string(raw.size()) +
                                                  " vectors for " + std::to_string(texts.size()) +
                                                  " texts");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(raw.size());
  const std::size_t dim = raw.front().size();
  for (auto& v : raw) {
    if (v.size() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "provider returned dims " + std::to_string(dim) +
                                                    " and " + std::to_string(v.size()) +
                                                    " in one batch");
    }
    out.push_back(EmbeddingVector::normalized(std::move(v)));
  }
  return out;
}

EmbeddingVector embed_text(Embedder& embedder, const std::string& text) {
  return embed_texts(embedder, {text}).front();
}

// --- HashedBowEmbedder ----------------------------------------------------

HashedBowEmbedder::HashedBowEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "embedding dim must be positive");
}

std::string HashedBowEmbedder::describe() const {
  return "hashed-bow(dim=" + std::to_string(dim_) + ",seed=" + std::to_string(seed_) + ")";
}

std::vector<double> HashedBowEmbedder::embed_one(const std::string& input) const {
  const std::uint64_t basis = 14695981039346656037ULL ^ seed_;
  std::vector<double> v(dim_, 0.0);
  auto terms = text::index_terms(input);
  if (terms.empty()) terms = text::tokenize(input);  // all-stopword text
  if (terms.empty()) terms.push_back(input);          // punctuation only
  for (const auto& t : terms) v[fnv1a64(t, basis) % dim_] += 1.0;
  return v;
}

std::vector<std::vector<double>> HashedBowEmbedder::embed_raw(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

// --- HttpEmbedder -----------------------------------------------------------

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options)
    : options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options_.max_in_flight))) {
  http::parse_url(options_.endpoint);
  options_.batch_size = std::max<std::size_t>(1, options_.batch_size);
}

std::string HttpEmbedder::describe() const {
  return "http(endpoint=" + options_.endpoint + ",model=" + options_.model + ")";
}

namespace {

std::vector<std::vector<double>> parse_vectors(const json& reply) {
  std::vector<std::vector<double>> out;
  if (reply.contains("vectors") && reply["vectors"].is_array()) {
    for (const auto& v : reply["vectors"]) out.push_back(v.get<std::vector<double>>());
  } else if (reply.contains("data") && reply["data"].is_array()) {
    for (const auto& item : reply["data"]) {
      out.push_back(item.at("embedding").get<std::vector<double>>());
    }
  } else {
    throw Error(ErrorCode::ProviderUnavailable, "embedding reply has neither 'vectors' nor 'data'");
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> HttpEmbedder::embed_raw(const std::vector<std::string>& texts) {
  const std::size_t batches = (texts.size() + options_.batch_size - 1) / options_.batch_size;
  http::PostOptions post;
  post.timeout = options_.timeout;
  post.max_attempts = options_.max_attempts;
  if (!options_.api_key.empty()) post.headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  auto results = parallel_map(batches, options_.max_in_flight, [&](std::size_t b) {
    const std::size_t begin = b * options_.batch_size;
    const std::size_t end = std::min(texts.size(), begin + options_.batch_size);
    json body;
    body["texts"] = std::vector<std::string>(texts.begin() + begin, texts.begin() + end);
    if (!options_.model.empty()) body["model"] = options_.model;

    in_flight_.acquire();
    json reply;
    try {
      reply = http::post_json(options_.endpoint, body, post);
    } catch (...) {
      in_flight_.release();
      throw;
    }
    in_flight_.release();
    try {
      auto vecs = parse_vectors(reply);
      if (vecs.size() != end - begin) {
        throw Error(ErrorCode::DimensionMismatch, "embedding reply has " + std::to_string(vecs.size()) +
                                                      " vectors for " + std::to_string(end - begin) +
                                                      " texts");
      }
      return vecs;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ProviderUnavailable, std::string("malformed embedding reply: ") + e.what());
    }
  });

  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (auto& batch : results) {
    for (auto& v : batch) out.push_back(std::move(v));
  }
  return out;
}

// --- CachingEmbedder --------------------------------------------------------

std::vector<std::vector<double>> CachingEmbedder::embed_raw(const std::vector<std::string>& texts) {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    for (const auto& t : texts) {
      if (!cache_.contains(t) &&
          std::find(missing.begin(), missing.end(), t) == missing.end()) {
        missing.push_back(t);
      }
    }
  }
  if (!missing.empty()) {
    auto fresh = inner_.embed_raw(missing);
    if (fresh.size() != missing.size()) {
      throw Error(ErrorCode::DimensionMismatch, "embedder returned a wrong number of vectors");
    }
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], std::move(fresh[i]));
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  std::lock_guard lock(mu_);
  for (const auto& t : texts) out.push_back(cache_.at(t));
  return out;
}

// --- EmbeddingIndex ---------------------------------------------------------

void EmbeddingIndex::add(const std::string& segment_id, const EmbeddingVector& vector) {
  if (positions_.contains(segment_id)) {
    throw Error(ErrorCode::InvalidArgument, "segment " + segment_id + " is already indexed");
  }
  if (dim_ != 0 && vector.dim() != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "index dim " + std::to_string(dim_) + ", vector dim " +
                                                  std::to_string(vector.dim()));
  }
  dim_ = vector.dim();
  positions_.emplace(segment_id, ids_.size());
  ids_.push_back(segment_id);
  vectors_.push_back(EmbeddingVector::normalized({vector.values().begin(), vector.values().end()}));
}

const EmbeddingVector& EmbeddingIndex::at(const std::string& segment_id) const {
  auto it = positions_.find(segment_id);
  if (it == positions_.end()) {
    throw Error(ErrorCode::InvalidArgument, "segment " + segment_id + " is not indexed");
  }
  return vectors_[it->second];
}

std::vector<Hit> EmbeddingIndex::top_k(const EmbeddingVector& query, std::size_t k) const {
  if (empty()) throw Error(ErrorCode::EmptyIndex, "top_k on an empty index");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "top_k needs k >= 1");
  std::vector<Hit> hits;
  hits.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    hits.push_back({ids_[i], cosine_similarity(vectors_[i], query)});
  }
  auto better = [](const Hit& a, const Hit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.segment_id < b.segment_id;
  };
  k = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
  hits.resize(k);
  return hits;
}

namespace {

void put_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes, 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

}  // namespace

void EmbeddingIndex::save(const std::filesystem::path& dir, const std::string& fingerprint) const {
  std::filesystem::create_directories(dir);
  std::ofstream bin(dir / "vectors.bin", std::ios::binary);
  if (!bin) throw Error(ErrorCode::UnreadableFile, "cannot write " + (dir / "vectors.bin").string());
  nlohmann::ordered_json manifest;
  manifest["fingerprint"] = fingerprint;
  manifest["dim"] = dim_;
  manifest["count"] = size();
  manifest["entries"] = json::array();
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (double v : vectors_[i].values()) put_le(bin, v);
    nlohmann::ordered_json e;
    e["segment_id"] = ids_[i];
    e["offset"] = offset;
    e["dim"] = vectors_[i].dim();
    manifest["entries"].push_back(std::move(e));
    offset += vectors_[i].dim() * sizeof(double);
  }
  std::ofstream man(dir / "manifest.json", std::ios::binary);
  man << manifest.dump(2) << '\n';
}

EmbeddingIndex EmbeddingIndex::load(const std::filesystem::path& dir, std::string* fingerprint) {
  std::ifstream man(dir / "manifest.json");
  std::ifstream bin(dir / "vectors.bin", std::ios::binary);
  if (!man || !bin) {
    throw Error(ErrorCode::UnreadableFile, "no embedding index in " + dir.string());
  }
  std::vector<unsigned char> blob((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
  EmbeddingIndex index;
  try {
    json manifest = json::parse(man);
    if (fingerprint) *fingerprint = manifest.value("fingerprint", "");
    for (const auto& e : manifest.at("entries")) {
      const auto offset = e.at("offset").get<std::uint64_t>();
      const auto dim = e.at("dim").get<std::size_t>();
      if (offset + dim * sizeof(double) > blob.size()) {
        throw Error(ErrorCode::UnreadableFile, "vectors.bin is truncated");
      }
      std::vector<double> values(dim);
      for (std::size_t i = 0; i < dim; ++i) values[i] = get_le(blob.data() + offset + i * 8);
      auto id = e.at("segment_id").get<std::string>();
      if (index.positions_.contains(id) || (index.dim_ != 0 && dim != index.dim_)) {
        throw Error(ErrorCode::UnreadableFile, "manifest entry " + id + " is duplicated or has a bad dim");
      }
      // Stored vectors are already unit length; keep their bits untouched.
      index.dim_ = dim;
      index.positions_.emplace(id, index.ids_.size());
      index.ids_.push_back(std::move(id));
      index.vectors_.emplace_back(std::move(values));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::UnreadableFile, "bad index manifest in " + dir.string() + ": " + e.what());
  }
  return index;
}

}  // namespace claimtree
