#include "claimtree/evaluation.hpp"

#include <cstdio>
#include <sstream>

#include "claimtree/error.hpp"
#include "claimtree/parallel.hpp"
#include "claimtree/prompts.hpp"

namespace claimtree {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double judge_score(Gateway& gateway, const PromptInstance& prompt, const std::string& what) {
  try {
    return gateway.complete_json(prompt).at("score").get<double>();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MissingFixture) throw;
    throw Error(ErrorCode::JudgeFailure, what + ": " + e.what());
  }
}

std::optional<double> mean_of(const std::vector<std::pair<std::string, double>>& items,
                              double (*transform)(double)) {
  if (items.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [id, v] : items) sum += transform(v);
  return sum / static_cast<double>(items.size());
}

double identity(double v) { return v; }
double sibling_normalized(double v) { return (v - 1.0) / 3.0; }

std::vector<const AspectNode*> judged_nodes(const AspectHierarchy& tree) {
  std::vector<const AspectNode*> out;
  for (const auto& n : tree.nodes()) {
    if (n.parent) out.push_back(&n);
  }
  if (out.empty()) out.push_back(&tree.root());
  return out;
}

template <typename MakePrompt>
MetricResult per_node(Gateway& gateway, const std::vector<const AspectNode*>& nodes, std::size_t workers,
                      const char* metric, MakePrompt make) {
  auto scores = parallel_map(nodes.size(), workers, [&](std::size_t i) {
    return judge_score(gateway, make(*nodes[i]), std::string(metric) + " of node " + nodes[i]->node_id);
  });
  MetricResult r;
  for (std::size_t i = 0; i < nodes.size(); ++i) r.items.emplace_back(nodes[i]->node_id, scores[i]);
  r.aggregate = mean_of(r.items, identity);
  return r;
}

}  // namespace

MetricResult eval_node_relevance(Gateway& gateway, const AspectHierarchy& tree, std::size_t workers) {
  return per_node(gateway, judged_nodes(tree), workers, "node relevance", [&](const AspectNode& n) {
    return prompts::node_relevance(tree.claim(), tree.lineage(n.node_id));
  });
}

MetricResult eval_path_granularity(Gateway& gateway, const AspectHierarchy& tree, std::size_t workers) {
  return per_node(gateway, judged_nodes(tree), workers, "path granularity", [&](const AspectNode& n) {
    return prompts::path_granularity(tree.claim(), tree.lineage(n.node_id));
  });
}

MetricResult eval_sibling_granularity(Gateway& gateway, const AspectHierarchy& tree,
                                      std::size_t workers) {
  std::vector<const AspectNode*> parents;
  for (const auto& n : tree.nodes()) {
    if (n.children.size() >= 2) parents.push_back(&n);
  }
  auto r = per_node(gateway, parents, workers, "sibling granularity", [&](const AspectNode& n) {
    std::vector<std::string> labels;
    for (const auto& c : n.children) labels.push_back(tree.node(c).label);
    return prompts::sibling_granularity(tree.claim(), n.label, labels);
  });
  r.aggregate = mean_of(r.items, sibling_normalized);
  return r;
}

MetricResult eval_uniqueness(Gateway& gateway, const AspectHierarchy& tree, std::size_t workers) {
  if (tree.size() == 1) return {{{tree.root().node_id, 1.0}}, 1.0};
  std::vector<const AspectNode*> nodes;
  for (const auto& n : tree.nodes()) {
    if (n.parent) nodes.push_back(&n);
  }
  const std::string outline = render_outline(tree);
  return per_node(gateway, nodes, workers, "uniqueness", [&](const AspectNode& n) {
    return prompts::uniqueness(tree.claim(), outline, tree.lineage(n.node_id));
  });
}

MetricResult eval_segment_quality(Gateway& gateway, const AspectHierarchy& tree,
                                  const SegmentMap& segments, std::size_t workers) {
  std::vector<std::pair<const AspectNode*, std::string>> pairs;
  for (const auto& n : tree.nodes()) {
    for (const auto& sid : n.attached_segments) {
      if (!segments.contains(sid)) {
        throw Error(ErrorCode::InvalidArgument, "segment " + sid + " of node " + n.node_id + " not in store");
      }
      pairs.emplace_back(&n, sid);
    }
  }
  auto scores = parallel_map(pairs.size(), workers, [&](std::size_t i) {
    const auto& [node, sid] = pairs[i];
    return judge_score(gateway,
                       prompts::segment_quality(tree.claim(), tree.lineage(node->node_id),
                                                segments.at(sid).text),
                       "segment quality of " + sid + " at node " + node->node_id);
  });
  MetricResult r;
  std::size_t k = 0;
  for (const auto& n : tree.nodes()) {
    if (n.attached_segments.empty()) continue;
    double sum = 0.0;
    for (std::size_t j = 0; j < n.attached_segments.size(); ++j) sum += scores[k++];
    r.items.emplace_back(n.node_id, sum / static_cast<double>(n.attached_segments.size()));
  }
  r.aggregate = mean_of(r.items, identity);
  return r;
}

MetricReport evaluate_hierarchy(Gateway& gateway, const AspectHierarchy& tree,
                                const SegmentMap& segments, std::size_t workers) {
  MetricReport report;
  report.node_relevance = eval_node_relevance(gateway, tree, workers);
  report.path_granularity = eval_path_granularity(gateway, tree, workers);
  report.sibling_granularity = eval_sibling_granularity(gateway, tree, workers);
  report.uniqueness = eval_uniqueness(gateway, tree, workers);
  report.segment_quality = eval_segment_quality(gateway, tree, segments, workers);
  return report;
}

namespace {

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json items_json(const MetricResult& r) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, v] : r.items) j[id] = v;
  return j;
}

std::string cell(const std::optional<double>& v, double scale) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * scale);
  return buf;
}

}  // namespace

ordered_json MetricReport::to_json() const {
  ordered_json j;
  ordered_json agg;
  agg["node_relevance"] = optional_number(node_relevance.aggregate);
  agg["path_granularity"] = optional_number(path_granularity.aggregate);
  agg["sibling_granularity"] = optional_number(sibling_granularity.aggregate);
  agg["uniqueness"] = optional_number(uniqueness.aggregate);
  agg["segment_quality"] = optional_number(segment_quality.aggregate);
  j["metrics"] = std::move(agg);
  ordered_json per;
  per["node_relevance"] = items_json(node_relevance);
  per["path_granularity"] = items_json(path_granularity);
  per["sibling_granularity"] = items_json(sibling_granularity);
  per["uniqueness"] = items_json(uniqueness);
  per["segment_quality"] = items_json(segment_quality);
  j["per_node"] = std::move(per);
  return j;
}

std::string MetricReport::table() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s%-8s%-8s%-8s%-8s\n%-8s%-8s%-8s%-8s%-8s\n", "Rel", "Path", "Sib",
                "Unique", "Seg", cell(node_relevance.aggregate, 100).c_str(),
                cell(path_granularity.aggregate, 100).c_str(),
                cell(sibling_granularity.aggregate, 1).c_str(), cell(uniqueness.aggregate, 100).c_str(),
                cell(segment_quality.aggregate, 100).c_str());
  return buf;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::AWins: return "A_wins";
    case Verdict::BWins: return "B_wins";
    case Verdict::ExplicitTie: return "explicit_tie";
    case Verdict::ImplicitTie: return "implicit_tie";
  }
  return "";
}

ordered_json PairwiseResult::to_json() const {
  ordered_json j;
  j["verdict"] = to_string(verdict);
  j["a_first"] = a_first;
  j["b_first"] = b_first;
  return j;
}

std::string render_outline(const AspectHierarchy& tree) {
  std::ostringstream out;
  auto walk = [&](auto&& self, const std::string& id) -> void {
    const auto& n = tree.node(id);
    out << std::string(2 * n.depth, ' ') << "- " << n.label << '\n';
    for (const auto& c : n.children) self(self, c);
  };
  walk(walk, tree.root().node_id);
  return out.str();
}

PairwiseResult pairwise_compare(Gateway& gateway, const AspectHierarchy& a, const AspectHierarchy& b) {
  if (a.claim() != b.claim()) {
    throw Error(ErrorCode::InvalidArgument, "pairwise comparison needs hierarchies of the same claim");
  }
  auto ask = [&](const AspectHierarchy& first, const AspectHierarchy& second) {
    try {
      return gateway.complete_json(prompts::pairwise(a.claim(), render_outline(first), render_outline(second)))
          .at("winner")
          .get<std::string>();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingFixture) throw;
      throw Error(ErrorCode::JudgeFailure, std::string("pairwise judge: ") + e.what());
    }
  };
  PairwiseResult r;
  r.a_first = ask(a, b);
  r.b_first = ask(b, a);
  // Map both answers onto A/B.
  auto first = r.a_first == "1" ? "A" : r.a_first == "2" ? "B" : "tie";
  auto second = r.b_first == "1" ? "B" : r.b_first == "2" ? "A" : "tie";
  std::string x = first;
  std::string y = second;
  if (x == y) {
    r.verdict = x == "A" ? Verdict::AWins : x == "B" ? Verdict::BWins : Verdict::ExplicitTie;
  } else {
    r.verdict = Verdict::ImplicitTie;
  }
  return r;
}

}  // namespace claimtree
