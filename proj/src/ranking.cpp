#include "claimtree/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "claimtree/error.hpp"

namespace claimtree {

void RankingParams::validate() const {
  if (!(beta > 0.0) || !(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta and gamma must be > 0");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (pool_size == 0 || k_segments == 0) {
    throw Error(ErrorCode::InvalidArgument, "pool_size and k_segments must be >= 1");
  }
}

double zipf_weighted_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyList, "weighted mean of an empty list");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 1; r <= values.size(); ++r) {
    num += values[r - 1] / static_cast<double>(r);
    den += 1.0 / static_cast<double>(r);
  }
  return num / den;
}

std::string keyword_query_text(const std::string& keyword, const std::vector<std::string>& lineage) {
  std::string out = keyword + " with respect to ";
  for (std::size_t i = 0; i < lineage.size(); ++i) {
    if (i) out += ", ";
    out += lineage[i];
  }
  return out;
}

std::vector<KeywordQuery> build_keyword_queries(Embedder& embedder, const std::string& node_id,
                                                const std::vector<std::string>& keywords,
                                                const std::vector<std::string>& lineage) {
  std::vector<std::string> texts;
  texts.reserve(keywords.size());
  for (const auto& kw : keywords) texts.push_back(keyword_query_text(kw, lineage));
  auto vectors = texts.empty() ? std::vector<EmbeddingVector>{} : embed_texts(embedder, texts);
  std::vector<KeywordQuery> out;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    out.push_back({keywords[i], node_id, texts[i], std::move(vectors[i]), i + 1});
  }
  return out;
}

double target_score(const EmbeddingVector& segment, const std::vector<KeywordQuery>& queries) {
  if (queries.empty()) throw Error(ErrorCode::EmptyKeywordSet, "node has no keyword queries");
  std::vector<double> sims;
  sims.reserve(queries.size());
  for (const auto& q : queries) sims.push_back(clamp_similarity(cosine_similarity(segment, q.embedding)));
  return zipf_weighted_mean(sims);
}

double distractor_score(const EmbeddingVector& segment,
                        const std::vector<std::vector<KeywordQuery>>& siblings) {
  if (siblings.empty()) return 0.0;
  double sum = 0.0;
  double best = 0.0;
  for (const auto& set : siblings) {
    double t = target_score(segment, set);
    sum += t;
    best = std::max(best, t);
  }
  return 0.5 * (sum / static_cast<double>(siblings.size())) + 0.5 * best;
}

double combine_scores(double target, double distractor, bool has_siblings,
                      const RankingParams& params) {
  if (!has_siblings) return target;
  return (params.beta * target) / (params.gamma * std::max(distractor, params.epsilon));
}

ScoredSegment discriminativeness(const std::string& segment_id, const EmbeddingVector& segment,
                                 const std::vector<KeywordQuery>& target_queries,
                                 const std::vector<std::vector<KeywordQuery>>& siblings,
                                 const RankingParams& params) {
  ScoredSegment s{segment_id, target_score(segment, target_queries),
                  distractor_score(segment, siblings), 0.0};
  s.score = combine_scores(s.target, s.distractor, !siblings.empty(), params);
  return s;
}

std::vector<ScoredSegment> rank_pool(const std::vector<PoolEntry>& pool,
                                     const std::vector<KeywordQuery>& target_queries,
                                     const std::vector<std::vector<KeywordQuery>>& siblings,
                                     const RankingParams& params) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "no candidate segments to rank");
  std::vector<ScoredSegment> scored;
  scored.reserve(pool.size());
  for (const auto& [id, vec] : pool) {
    scored.push_back(discriminativeness(id, vec, target_queries, siblings, params));
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredSegment& a, const ScoredSegment& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.segment_id < b.segment_id;
  });
  if (scored.size() > params.k_segments) scored.resize(params.k_segments);
  return scored;
}

std::vector<PoolEntry> retrieve_pool(const EmbeddingIndex& index, const EmbeddingVector& query,
                                     std::size_t pool_size) {
  std::vector<PoolEntry> pool;
  for (const auto& hit : index.top_k(query, pool_size)) {
    if (hit.similarity <= 0.0) break;
    pool.emplace_back(hit.segment_id, index.at(hit.segment_id));
  }
  return pool;
}

void append_ranking_dump(const std::filesystem::path& path, const std::string& node_id,
                         const std::vector<ScoredSegment>& ranked) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << std::setprecision(17);
  for (const auto& s : ranked) {
    out << node_id << '\t' << s.segment_id << '\t' << s.target << '\t' << s.distractor << '\t'
        << s.score << '\n';
  }
}

}  // namespace claimtree
