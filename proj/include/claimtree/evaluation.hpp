#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "claimtree/corpus.hpp"
#include "claimtree/hierarchy.hpp"
#include "claimtree/llm.hpp"

namespace claimtree {

// Per-item judgments (node or sibling-set id -> score) and their aggregate.
struct MetricResult {
  std::vector<std::pair<std::string, double>> items;
  std::optional<double> aggregate;  // absent when nothing was judged
};

struct MetricReport {
  MetricResult node_relevance;
  MetricResult path_granularity;
  MetricResult sibling_granularity;  // items hold raw 1-4, aggregate is (s-1)/3 averaged
  MetricResult uniqueness;
  MetricResult segment_quality;      // items hold per-node fractions

  nlohmann::ordered_json to_json() const;
  // Rel, Path, Sib, Unique, Seg; fractions other than Sib shown as percentages.
  std::string table() const;
};

// Root is judged only when it is the whole tree.
MetricResult eval_node_relevance(Gateway& gateway, const AspectHierarchy& tree, std::size_t workers = 1);
MetricResult eval_path_granularity(Gateway& gateway, const AspectHierarchy& tree, std::size_t workers = 1);
// One judgment per node with at least two children.
MetricResult eval_sibling_granularity(Gateway& gateway, const AspectHierarchy& tree,
                                      std::size_t workers = 1);
// 1 = unique. A root-only tree scores 1 without any judge call.
MetricResult eval_uniqueness(Gateway& gateway, const AspectHierarchy& tree, std::size_t workers = 1);
// Fraction of each node's attached segments judged relevant; nodes without
// segments are skipped.
MetricResult eval_segment_quality(Gateway& gateway, const AspectHierarchy& tree,
                                  const SegmentMap& segments, std::size_t workers = 1);

MetricReport evaluate_hierarchy(Gateway& gateway, const AspectHierarchy& tree,
                                const SegmentMap& segments, std::size_t workers = 1);

enum class Verdict { AWins, BWins, ExplicitTie, ImplicitTie };
std::string_view to_string(Verdict verdict);

struct PairwiseResult {
  Verdict verdict = Verdict::ImplicitTie;
  std::string a_first;  // raw winner field with A shown first
  std::string b_first;  // raw winner field with B shown first

  nlohmann::ordered_json to_json() const;
};

// Judges A-vs-B and B-vs-A; a winner must win in both orders.
PairwiseResult pairwise_compare(Gateway& gateway, const AspectHierarchy& a, const AspectHierarchy& b);

// Indented label outline used in judge prompts.
std::string render_outline(const AspectHierarchy& tree);

}  // namespace claimtree
