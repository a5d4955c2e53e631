#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "claimtree/corpus.hpp"
#include "claimtree/embedding.hpp"
#include "claimtree/hierarchy.hpp"
#include "claimtree/llm.hpp"

namespace claimtree {

struct FilterParams {
  double delta = 0.5;
  std::size_t window = 10;  // half-width n of the [i-n, i+n] window
  std::size_t min_chars = 500;

  // Throws Error(InvalidArgument).
  void validate() const;
};

enum class Stance { Supports, Neutral, Opposes, Irrelevant };

std::string_view to_string(Stance stance);
// Throws Error(SchemaViolation) for labels outside the four allowed values.
Stance parse_stance(std::string_view label);

// "<aspect label> with respect to <claim>"
std::string claim_aspect_query(const std::string& aspect_label, const std::string& claim);

// Unit vector of 0.5 * (emb(claim) + mean of the aspect-query embeddings).
// Throws Error(NoCoarseAspects).
EmbeddingVector claim_representation(Embedder& embedder, const std::string& claim,
                                     const std::vector<std::string>& coarse_labels);

// Answers whether the segment at a 0-based rank is relevant to the claim.
using RankJudge = std::function<bool(std::size_t rank)>;

struct BoundaryResult {
  std::size_t boundary = 0;  // segments ranked below this are kept
  std::size_t judged = 0;    // distinct ranks sent to the judge
  std::size_t probes = 0;    // windows evaluated by the search
};

// Smallest rank i whose clipped window [i-n, i+n] has a relevant fraction below
// delta, or `count` when there is none. Found by binary search assuming
// relevance decays with rank; each rank is judged at most once. A window is
// judged as one batch using up to `workers` threads.
BoundaryResult relevance_boundary(std::size_t count, const RankJudge& judge,
                                  const FilterParams& params, std::size_t workers = 1);

// Top-down embedding classifier over a built hierarchy. At each node the
// children within `relative_threshold` of the best child similarity are
// explored; a segment attaches where descent stops. Unclassifiable segments
// attach to the root.
class TaxonomyClassifier {
 public:
  TaxonomyClassifier(const AspectHierarchy& tree, Embedder& embedder,
                     double relative_threshold = 0.9);

  std::vector<std::string> classify(const EmbeddingVector& segment) const;

  static std::string node_text(const AspectNode& node);

 private:
  void descend(const std::string& node_id, const EmbeddingVector& segment,
               std::vector<std::string>& out) const;

  const AspectHierarchy& tree_;
  double relative_threshold_;
  std::map<std::string, EmbeddingVector> node_vectors_;
};

// Gateway-backed judges. Contract failures are reported as
// Error(JudgeFailure) / Error(SchemaViolation) naming the segment (and node).
bool judge_relevance(Gateway& gateway, const Segment& segment, const std::string& claim,
                     const std::vector<std::string>& aspects);
Stance detect_stance(Gateway& gateway, const Segment& segment, const AspectHierarchy& tree,
                     const std::string& node_id);

// Segment ids per stance, in attachment order.
struct StanceBuckets {
  std::vector<std::string> support;
  std::vector<std::string> neutral;
  std::vector<std::string> oppose;
};

// One summary per non-empty bucket; paper ids are the distinct source
// documents in first-seen order.
PerspectiveSet summarize_perspectives(Gateway& gateway, const AspectHierarchy& tree,
                                      const std::string& node_id, const StanceBuckets& buckets,
                                      const SegmentMap& segments, std::size_t workers = 1);

struct StanceCounts {
  std::size_t support = 0;
  std::size_t neutral = 0;
  std::size_t oppose = 0;
  std::size_t total() const { return support + neutral + oppose; }
};

struct Consensus {
  StanceCounts segments;
  StanceCounts papers;
  StanceCounts subtree_segments;  // distinct over the node and its descendants
  StanceCounts subtree_papers;
};

Consensus consensus_counts(const AspectHierarchy& tree, const std::string& node_id);

// Integer percentages support:neutral:oppose, e.g. "80:10:10"; "0:0:0" when empty.
std::string consensus_ratio(const StanceCounts& counts);

struct PerspectiveConfig {
  FilterParams filter;
  double relative_threshold = 0.9;
  std::size_t concurrency = 4;
};

struct PerspectiveRun {
  std::size_t eligible = 0;              // segments long enough to be filtered
  BoundaryResult boundary;
  std::vector<std::string> retained;     // S'0 in similarity order
  std::vector<std::string> warnings;
};

// Filters, classifies, judges stances and summarizes; every node of `tree`
// ends with attached_segments and a PerspectiveSet.
PerspectiveRun discover_perspectives(AspectHierarchy& tree, const std::vector<Segment>& segments,
                                     const EmbeddingIndex& index, Embedder& embedder,
                                     Gateway& gateway, const PerspectiveConfig& config);

// Flat table: node_id,stance,count,paper_count,subtree_count,subtree_paper_count
std::string consensus_csv(const AspectHierarchy& tree);

}  // namespace claimtree
