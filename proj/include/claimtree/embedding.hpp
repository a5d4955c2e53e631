#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace claimtree {

// Finite, non-empty real vector. Stored vectors are unit length (see normalized()).
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  // Scales to unit L2 norm. Throws Error(ZeroVector).
  static EmbeddingVector normalized(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double norm() const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

// Standard cosine. Throws Error(DimensionMismatch | ZeroVector).
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Text embedding backend. Implementations return raw vectors; embed_texts()
// validates and normalizes them.
class Embedder {
 public:
  virtual ~Embedder() = default;
  // Identifies the backend and its settings; part of artifact fingerprints.
  virtual std::string describe() const = 0;
  virtual std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) = 0;
};

// One unit-norm vector per text, order preserved. Throws
// Error(InvalidArgument) on empty texts, Error(DimensionMismatch) when the
// provider returns inconsistent dims or a wrong count.
std::vector<EmbeddingVector> embed_texts(Embedder& embedder, const std::vector<std::string>& texts);
EmbeddingVector embed_text(Embedder& embedder, const std::string& text);

// Offline embedder: stemmed tokens hashed into `dim` count buckets, L2-normalized.
class HashedBowEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  explicit HashedBowEmbedder(std::size_t dim = kDefaultDim, std::uint64_t seed = 0);

  std::string describe() const override;
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;

 private:
  std::vector<double> embed_one(const std::string& text) const;

  std::size_t dim_;
  std::uint64_t seed_;
};

struct HttpEmbedderOptions {
  std::string endpoint;     // POST {texts, model} -> {vectors}
  std::string model;
  std::string api_key;      // sent as a Bearer token when non-empty
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds timeout{60000};
  std::size_t max_attempts = 3;
};

class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderOptions options);

  std::string describe() const override;
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;

 private:
  HttpEmbedderOptions options_;
  std::counting_semaphore<> in_flight_;
};

// Memoizes another embedder by exact text. Thread-safe.
class CachingEmbedder final : public Embedder {
 public:
  explicit CachingEmbedder(Embedder& inner) : inner_(inner) {}

  std::string describe() const override { return inner_.describe(); }
  std::vector<std::vector<double>> embed_raw(const std::vector<std::string>& texts) override;

 private:
  Embedder& inner_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> cache_;
};

struct Hit {
  std::string segment_id;
  double similarity = 0.0;
};

// Write-once, read-many flat index of unit vectors keyed by segment id.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;

  // Normalizes on ingest. Throws Error(InvalidArgument) for a repeated id and
  // Error(DimensionMismatch) when dims disagree.
  void add(const std::string& segment_id, const EmbeddingVector& vector);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t dim() const { return dim_; }
  bool contains(const std::string& segment_id) const { return positions_.contains(segment_id); }
  const EmbeddingVector& at(const std::string& segment_id) const;
  const std::vector<std::string>& ids() const { return ids_; }

  // Descending similarity, ties by ascending segment_id, min(k, size) entries.
  // Throws Error(EmptyIndex), Error(InvalidArgument) for k == 0.
  std::vector<Hit> top_k(const EmbeddingVector& query, std::size_t k) const;

  // vectors.bin (little-endian float64, row-major) + manifest.json.
  void save(const std::filesystem::path& dir, const std::string& fingerprint) const;
  static EmbeddingIndex load(const std::filesystem::path& dir, std::string* fingerprint = nullptr);

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<EmbeddingVector> vectors_;
  std::map<std::string, std::size_t> positions_;
};

}  // namespace claimtree
