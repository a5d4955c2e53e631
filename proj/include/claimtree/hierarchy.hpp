#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "claimtree/corpus.hpp"
#include "claimtree/embedding.hpp"
#include "claimtree/llm.hpp"
#include "claimtree/ranking.hpp"

namespace claimtree {

struct StanceBucket {
  std::string summary;
  std::vector<std::string> segment_ids;
  std::vector<std::string> paper_ids;  // distinct, first-seen order
};

struct PerspectiveSet {
  StanceBucket support;
  StanceBucket neutral;
  StanceBucket oppose;
};

struct AspectNode {
  std::string node_id;
  std::string label;
  std::string description;
  std::vector<std::string> keywords;  // most significant first
  std::optional<std::string> parent;
  std::vector<std::string> children;
  std::size_t depth = 0;
  std::vector<std::string> attached_segments;
  std::vector<std::string> ranked_segments;  // discriminative top-k used for expansion
  std::optional<PerspectiveSet> perspectives;
};

// Label, description and keywords proposed by the LLM for a new node.
struct AspectDraft {
  std::string label;
  std::string description;
  std::vector<std::string> keywords;
};

class AspectHierarchy {
 public:
  AspectHierarchy() = default;
  explicit AspectHierarchy(std::string claim);

  const std::string& claim() const { return root().label; }
  const AspectNode& root() const { return nodes_.front(); }
  const std::vector<AspectNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  bool contains(const std::string& node_id) const { return index_.contains(node_id); }
  // Throws Error(InvalidArgument) for unknown ids.
  const AspectNode& node(const std::string& node_id) const;
  AspectNode& node(const std::string& node_id);

  // Child ids are "<parent>.<1-based ordinal>".
  const std::string& add_child(const std::string& parent_id, const AspectDraft& draft);

  // Labels from the root claim down to the node, inclusive.
  std::vector<std::string> lineage(const std::string& node_id) const;
  std::vector<std::string> siblings(const std::string& node_id) const;
  std::size_t max_node_depth() const;

  std::string config_fingerprint;
  bool complete = true;
  std::string failure;  // set when complete == false

  nlohmann::ordered_json to_json() const;
  static AspectHierarchy from_json(const nlohmann::json& value);
  void save(const std::filesystem::path& path) const;
  // Throws Error(UnreadableFile).
  static AspectHierarchy load(const std::filesystem::path& path);

 private:
  std::vector<AspectNode> nodes_;
  std::map<std::string, std::size_t> index_;
};

nlohmann::ordered_json to_json(const PerspectiveSet& set);
PerspectiveSet perspective_set_from_json(const nlohmann::json& value);

struct HierarchyConfig {
  std::size_t max_depth = 3;
  std::size_t k_aspects = 5;
  std::size_t k_subaspects = 5;
  std::size_t k_keywords = 10;
  std::size_t n_enrich = 10;  // segments shown to the keyword extractor
  RankingParams ranking;
  std::size_t concurrency = 4;
  std::optional<std::filesystem::path> ranking_dump;

  // Throws Error(InvalidArgument).
  void validate() const;
};

// Structural violations (empty when the tree is well formed): link symmetry,
// depth consistency, reachability, child counts, keyword counts of non-root
// nodes, depth bound.
std::vector<std::string> check_structure(const AspectHierarchy& tree, const HierarchyConfig& config);

// "Claim: ...; Aspect: label: description; Aspect Keywords: a, b, c"
std::string node_query_text(const std::string& claim, const AspectNode& node);

// Throws Error(EmptyAspectList) for an empty reply, Error(SchemaViolation) for
// more than k_aspects or keyword lists of the wrong length.
std::vector<AspectDraft> discover_coarse_aspects(Gateway& gateway, const std::string& claim,
                                                 std::size_t k_aspects);

// Retrieves n_pool segments for the node query, asks for 2k candidates, then
// filters to exactly k distinct keywords. Throws Error(EmptyIndex | SchemaViolation).
std::vector<std::string> enrich_keywords(Gateway& gateway, Embedder& embedder,
                                         const EmbeddingIndex& index, const SegmentMap& segments,
                                         const std::string& claim, const AspectNode& node,
                                         std::size_t n_pool, std::size_t k_keywords);

// Throws Error(TooFewSubaspects) below two, Error(SchemaViolation) above k.
std::vector<AspectDraft> discover_subaspects(Gateway& gateway, const std::string& claim,
                                             const AspectNode& node,
                                             const std::vector<std::string>& lineage,
                                             const std::vector<std::string>& segment_texts,
                                             std::size_t k_subaspects);

struct OperationEvent {
  std::string op;  // coarse | enrich | rank | discover | leaf
  std::string node_id;
  std::size_t level = 0;
  std::string detail;
};

nlohmann::ordered_json to_json(const OperationEvent& event);

struct BuildResult {
  AspectHierarchy tree;
  std::vector<OperationEvent> log;
  std::exception_ptr failure;  // set when the tree is partial
};

// Breadth-first, level-synchronous construction. A level's nodes are all
// enriched before any of them is ranked. Nodes at max_depth are never
// expanded; nodes with an empty retrieval pool become leaves. Failures are
// captured in the result with the tree marked partial.
BuildResult build_hierarchy(const std::string& claim, const EmbeddingIndex& index,
                            const SegmentMap& segments, Embedder& embedder, Gateway& gateway,
                            const HierarchyConfig& config);

}  // namespace claimtree
