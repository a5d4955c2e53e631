#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "claimtree/embedding.hpp"

namespace claimtree {

struct KeywordQuery {
  std::string keyword;
  std::string node_id;
  std::string query_text;
  EmbeddingVector embedding;
  std::size_t rank = 1;  // 1-based position in the node's keyword list
};

struct RankingParams {
  double beta = 1.0;
  double gamma = 1.0;
  std::size_t pool_size = 100;
  std::size_t k_segments = 10;
  double epsilon = 1e-6;

  // Throws Error(InvalidArgument).
  void validate() const;
};

struct ScoredSegment {
  std::string segment_id;
  double target = 0.0;
  double distractor = 0.0;
  double score = 0.0;
};

// Harmonic (1/r) weighted mean in input order. Throws Error(EmptyList).
double zipf_weighted_mean(std::span<const double> values);

// Negative cosines count as no similarity.
inline double clamp_similarity(double s) { return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s); }

// "<keyword> with respect to <labels joined by ', '>"; labels run from the root
// claim down to the node owning the keyword.
std::string keyword_query_text(const std::string& keyword, const std::vector<std::string>& lineage);

std::vector<KeywordQuery> build_keyword_queries(Embedder& embedder, const std::string& node_id,
                                                const std::vector<std::string>& keywords,
                                                const std::vector<std::string>& lineage);

// Throws Error(EmptyKeywordSet).
double target_score(const EmbeddingVector& segment, const std::vector<KeywordQuery>& queries);

// 0.5 * mean + 0.5 * max of the target scores against each sibling set; 0 with
// no siblings.
double distractor_score(const EmbeddingVector& segment,
                        const std::vector<std::vector<KeywordQuery>>& siblings);

// Score is target alone when there are no siblings.
double combine_scores(double target, double distractor, bool has_siblings,
                      const RankingParams& params);

ScoredSegment discriminativeness(const std::string& segment_id, const EmbeddingVector& segment,
                                 const std::vector<KeywordQuery>& target_queries,
                                 const std::vector<std::vector<KeywordQuery>>& siblings,
                                 const RankingParams& params);

using PoolEntry = std::pair<std::string, EmbeddingVector>;

// Scores every pool entry, sorts by score descending (ties by segment_id) and
// keeps k_segments. Throws Error(EmptyPool).
std::vector<ScoredSegment> rank_pool(const std::vector<PoolEntry>& pool,
                                     const std::vector<KeywordQuery>& target_queries,
                                     const std::vector<std::vector<KeywordQuery>>& siblings,
                                     const RankingParams& params);

// Top pool_size hits for the node query, keeping only positive similarity.
std::vector<PoolEntry> retrieve_pool(const EmbeddingIndex& index, const EmbeddingVector& query,
                                     std::size_t pool_size);

// Appends "node_id\tsegment_id\ttarget\tdistractor\tscore" rows.
void append_ranking_dump(const std::filesystem::path& path, const std::string& node_id,
                         const std::vector<ScoredSegment>& ranked);

}  // namespace claimtree
