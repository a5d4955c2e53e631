#include "claimtree/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "claimtree/error.hpp"
#include "claimtree/parallel.hpp"
#include "claimtree/prompts.hpp"
#include "claimtree/text.hpp"

namespace claimtree {

using nlohmann::json;
using nlohmann::ordered_json;

AspectHierarchy::AspectHierarchy(std::string claim) {
  AspectNode root;
  root.node_id = "0";
  root.label = std::move(claim);
  nodes_.push_back(std::move(root));
  index_["0"] = 0;
}

const AspectNode& AspectHierarchy::node(const std::string& node_id) const {
  auto it = index_.find(node_id);
  if (it == index_.end()) throw Error(ErrorCode::InvalidArgument, "unknown node " + node_id);
  return nodes_[it->second];
}

AspectNode& AspectHierarchy::node(const std::string& node_id) {
  return const_cast<AspectNode&>(std::as_const(*this).node(node_id));
}

const std::string& AspectHierarchy::add_child(const std::string& parent_id, const AspectDraft& draft) {
  std::size_t parent_pos = index_.at(parent_id);
  AspectNode child;
  child.node_id = parent_id + "." + std::to_string(nodes_[parent_pos].children.size() + 1);
  child.label = draft.label;
  child.description = draft.description;
  child.keywords = draft.keywords;
  child.parent = parent_id;
  child.depth = nodes_[parent_pos].depth + 1;
  nodes_[parent_pos].children.push_back(child.node_id);
  index_[child.node_id] = nodes_.size();
  nodes_.push_back(std::move(child));
  return nodes_.back().node_id;
}

std::vector<std::string> AspectHierarchy::lineage(const std::string& node_id) const {
  std::vector<std::string> labels;
  const AspectNode* n = &node(node_id);
  while (true) {
    labels.push_back(n->label);
    if (!n->parent) break;
    n = &node(*n->parent);
  }
  std::reverse(labels.begin(), labels.end());
  return labels;
}

std::vector<std::string> AspectHierarchy::siblings(const std::string& node_id) const {
  const auto& n = node(node_id);
  if (!n.parent) return {};
  std::vector<std::string> out;
  for (const auto& c : node(*n.parent).children) {
    if (c != node_id) out.push_back(c);
  }
  return out;
}

std::size_t AspectHierarchy::max_node_depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

namespace {

ordered_json bucket_json(const StanceBucket& b) {
  ordered_json j;
  j["summary"] = b.summary;
  j["segment_ids"] = b.segment_ids;
  j["paper_ids"] = b.paper_ids;
  j["count"] = b.segment_ids.size();
  j["paper_count"] = b.paper_ids.size();
  return j;
}

StanceBucket bucket_from_json(const json& j) {
  StanceBucket b;
  b.summary = j.value("summary", "");
  b.segment_ids = j.value("segment_ids", std::vector<std::string>{});
  b.paper_ids = j.value("paper_ids", std::vector<std::string>{});
  return b;
}

}  // namespace

ordered_json to_json(const PerspectiveSet& set) {
  ordered_json j;
  j["support"] = bucket_json(set.support);
  j["neutral"] = bucket_json(set.neutral);
  j["oppose"] = bucket_json(set.oppose);
  return j;
}

PerspectiveSet perspective_set_from_json(const json& value) {
  return {bucket_from_json(value.at("support")), bucket_from_json(value.at("neutral")),
          bucket_from_json(value.at("oppose"))};
}

ordered_json AspectHierarchy::to_json() const {
  ordered_json j;
  j["claim"] = claim();
  j["config_fingerprint"] = config_fingerprint;
  j["status"] = complete ? "complete" : "partial";
  if (!complete) j["failure"] = failure;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : nodes_) {
    ordered_json o;
    o["node_id"] = n.node_id;
    o["label"] = n.label;
    o["description"] = n.description;
    o["keywords"] = n.keywords;
    o["parent"] = n.parent ? ordered_json(*n.parent) : ordered_json(nullptr);
    o["children"] = n.children;
    o["depth"] = n.depth;
    o["attached_segments"] = n.attached_segments;
    o["ranked_segments"] = n.ranked_segments;
    o["perspectives"] = n.perspectives ? claimtree::to_json(*n.perspectives) : ordered_json(nullptr);
    nodes.push_back(std::move(o));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

AspectHierarchy AspectHierarchy::from_json(const json& value) {
  try {
    AspectHierarchy tree;
    tree.config_fingerprint = value.value("config_fingerprint", "");
    tree.complete = value.value("status", "complete") == "complete";
    tree.failure = value.value("failure", "");
    for (const auto& o : value.at("nodes")) {
      AspectNode n;
      n.node_id = o.at("node_id").get<std::string>();
      n.label = o.at("label").get<std::string>();
      n.description = o.value("description", "");
      n.keywords = o.value("keywords", std::vector<std::string>{});
      if (o.contains("parent") && !o["parent"].is_null()) n.parent = o["parent"].get<std::string>();
      n.children = o.value("children", std::vector<std::string>{});
      n.depth = o.at("depth").get<std::size_t>();
      n.attached_segments = o.value("attached_segments", std::vector<std::string>{});
      n.ranked_segments = o.value("ranked_segments", std::vector<std::string>{});
      if (o.contains("perspectives") && !o["perspectives"].is_null()) {
        n.perspectives = perspective_set_from_json(o["perspectives"]);
      }
      if (tree.index_.contains(n.node_id)) {
        throw Error(ErrorCode::UnreadableFile, "duplicate node id " + n.node_id);
      }
      tree.index_[n.node_id] = tree.nodes_.size();
      tree.nodes_.push_back(std::move(n));
    }
    if (tree.nodes_.empty() || tree.nodes_.front().parent) {
      throw Error(ErrorCode::UnreadableFile, "hierarchy must start with its root node");
    }
    return tree;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::UnreadableFile, std::string("malformed hierarchy: ") + e.what());
  }
}

void AspectHierarchy::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

AspectHierarchy AspectHierarchy::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read hierarchy " + path.string());
  json value = json::parse(in, nullptr, false);
  if (value.is_discarded()) throw Error(ErrorCode::UnreadableFile, "invalid JSON in " + path.string());
  return from_json(value);
}

void HierarchyConfig::validate() const {
  if (k_aspects == 0 || k_subaspects < 2 || k_keywords == 0 || n_enrich == 0) {
    throw Error(ErrorCode::InvalidArgument,
                "k_aspects, k_keywords, n_enrich must be >= 1 and k_subaspects >= 2");
  }
  ranking.validate();
}

std::vector<std::string> check_structure(const AspectHierarchy& tree, const HierarchyConfig& config) {
  std::vector<std::string> problems;
  if (tree.size() == 0) return {"empty tree"};
  const auto& root = tree.root();
  if (root.depth != 0) problems.push_back("root depth is not 0");
  std::set<std::string> reached;
  std::deque<std::string> queue{root.node_id};
  while (!queue.empty()) {
    std::string id = queue.front();
    queue.pop_front();
    if (!reached.insert(id).second) {
      problems.push_back("node " + id + " reached twice");
      continue;
    }
    const auto& n = tree.node(id);
    if (n.depth > config.max_depth) problems.push_back("node " + id + " deeper than max_depth");
    if (n.parent && n.keywords.size() != config.k_keywords) {
      problems.push_back("node " + id + " has " + std::to_string(n.keywords.size()) + " keywords");
    }
    if (!n.children.empty()) {
      std::size_t lo = n.parent ? 2 : 1;
      std::size_t hi = n.parent ? config.k_subaspects : config.k_aspects;
      if (n.children.size() < lo || n.children.size() > hi) {
        problems.push_back("node " + id + " has " + std::to_string(n.children.size()) + " children");
      }
    }
    for (const auto& c : n.children) {
      if (!tree.contains(c)) {
        problems.push_back("node " + id + " lists missing child " + c);
        continue;
      }
      const auto& child = tree.node(c);
      if (child.parent != id) problems.push_back("child " + c + " does not point back to " + id);
      if (child.depth != n.depth + 1) problems.push_back("child " + c + " has inconsistent depth");
      queue.push_back(c);
    }
  }
  if (reached.size() != tree.size()) problems.push_back("tree is not connected");
  return problems;
}

std::string node_query_text(const std::string& claim, const AspectNode& node) {
  std::string kws;
  for (const auto& k : node.keywords) kws += (kws.empty() ? "" : ", ") + k;
  return "Claim: " + claim + "; Aspect: " + node.label + ": " + node.description +
         "; Aspect Keywords: " + kws;
}

namespace {

std::vector<AspectDraft> parse_drafts(const json& list) {
  std::vector<AspectDraft> out;
  for (const auto& a : list) {
    AspectDraft d;
    d.label = text::normalize_whitespace(a.at("label").get<std::string>());
    d.description = a.at("description").get<std::string>();
    d.keywords = a.at("keywords").get<std::vector<std::string>>();
    out.push_back(std::move(d));
  }
  return out;
}

// First `limit` keywords distinct under keyword_key, original spelling kept.
std::vector<std::string> distinct_keywords(const json& list, std::size_t limit) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& kw : list) {
    if (out.size() == limit) break;
    std::string s = text::normalize_whitespace(kw.get<std::string>());
    if (seen.insert(prompts::keyword_key(s)).second) out.push_back(s);
  }
  return out;
}

std::vector<std::string> segment_texts(const SegmentMap& segments, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) {
    auto it = segments.find(id);
    if (it == segments.end()) throw Error(ErrorCode::InvalidArgument, "segment " + id + " not in store");
    out.push_back(it->second.text);
  }
  return out;
}

}  // namespace

std::vector<AspectDraft> discover_coarse_aspects(Gateway& gateway, const std::string& claim,
                                                 std::size_t k_aspects) {
  json reply = gateway.complete_json(prompts::coarse_aspects(claim, k_aspects));
  auto drafts = parse_drafts(reply.at("aspects"));
  if (drafts.empty()) throw Error(ErrorCode::EmptyAspectList, "no aspects proposed for: " + claim);
  return drafts;
}

std::vector<std::string> enrich_keywords(Gateway& gateway, Embedder& embedder,
                                         const EmbeddingIndex& index, const SegmentMap& segments,
                                         const std::string& claim, const AspectNode& node,
                                         std::size_t n_pool, std::size_t k_keywords) {
  auto query = embed_text(embedder, node_query_text(claim, node));
  std::vector<std::string> ids;
  for (const auto& hit : index.top_k(query, n_pool)) ids.push_back(hit.segment_id);
  auto contents = segment_texts(segments, ids);

  json extracted = gateway.complete_json(
      prompts::keyword_extract(claim, node.label, node.description, 2 * k_keywords, contents));
  auto candidates = distinct_keywords(extracted.at("keywords"), 2 * k_keywords);

  json filtered = gateway.complete_json(
      prompts::keyword_filter(claim, node.label, node.description, k_keywords, candidates));
  auto keywords = distinct_keywords(filtered.at("keywords"), k_keywords);
  if (keywords.size() < k_keywords) {
    throw Error(ErrorCode::SchemaViolation, "keyword filter for " + node.node_id + " returned " +
                                                std::to_string(keywords.size()) + " distinct keywords");
  }
  return keywords;
}

std::vector<AspectDraft> discover_subaspects(Gateway& gateway, const std::string& claim,
                                             const AspectNode& node,
                                             const std::vector<std::string>& lineage,
                                             const std::vector<std::string>& segment_texts,
                                             std::size_t k_subaspects) {
  json reply = gateway.complete_json(prompts::subaspect_discovery(
      claim, node.label, node.description, lineage, k_subaspects, segment_texts));
  auto drafts = parse_drafts(reply.at("subaspects"));
  if (drafts.size() < 2) {
    throw Error(ErrorCode::TooFewSubaspects, node.node_id + " (" + node.label + ") got " +
                                                 std::to_string(drafts.size()) + " subaspects");
  }
  return drafts;
}

ordered_json to_json(const OperationEvent& event) {
  ordered_json j;
  j["op"] = event.op;
  j["node_id"] = event.node_id;
  j["level"] = event.level;
  j["detail"] = event.detail;
  return j;
}

namespace {

struct Expansion {
  std::vector<std::string> ranked;
  std::vector<ScoredSegment> scores;
  std::vector<AspectDraft> children;
  bool empty_pool = false;
};

}  // namespace

BuildResult build_hierarchy(const std::string& claim, const EmbeddingIndex& index,
                            const SegmentMap& segments, Embedder& embedder, Gateway& gateway,
                            const HierarchyConfig& config) {
  config.validate();
  BuildResult result{AspectHierarchy(claim), {}, nullptr};
  auto& tree = result.tree;
  auto& log = result.log;
  const std::size_t workers = config.concurrency;

  try {
    if (config.max_depth == 0) return result;
    if (index.empty()) throw Error(ErrorCode::EmptyIndex, "segment index is empty");

    auto coarse = discover_coarse_aspects(gateway, claim, config.k_aspects);
    std::vector<std::string> frontier;
    for (const auto& d : coarse) frontier.push_back(tree.add_child("0", d));
    log.push_back({"coarse", "0", 0, std::to_string(coarse.size()) + " aspects"});

    std::map<std::string, std::vector<KeywordQuery>> queries;
    for (std::size_t level = 1; !frontier.empty(); ++level) {
      auto enriched = parallel_map(frontier.size(), workers, [&](std::size_t i) {
        return enrich_keywords(gateway, embedder, index, segments, claim, tree.node(frontier[i]),
                               config.n_enrich, config.k_keywords);
      });
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        tree.node(frontier[i]).keywords = std::move(enriched[i]);
        log.push_back({"enrich", frontier[i], level, ""});
      }
      if (level >= config.max_depth) break;

      auto built = parallel_map(frontier.size(), workers, [&](std::size_t i) {
        const auto& id = frontier[i];
        return build_keyword_queries(embedder, id, tree.node(id).keywords, tree.lineage(id));
      });
      for (std::size_t i = 0; i < frontier.size(); ++i) queries[frontier[i]] = std::move(built[i]);

      auto expansions = parallel_map(frontier.size(), workers, [&](std::size_t i) {
        const auto& node = tree.node(frontier[i]);
        Expansion ex;
        auto pool = retrieve_pool(index, embed_text(embedder, node_query_text(claim, node)),
                                  config.ranking.pool_size);
        if (pool.empty()) {
          ex.empty_pool = true;
          return ex;
        }
        std::vector<std::vector<KeywordQuery>> sibling_sets;
        for (const auto& s : tree.siblings(node.node_id)) sibling_sets.push_back(queries.at(s));
        ex.scores = rank_pool(pool, queries.at(node.node_id), sibling_sets, config.ranking);
        for (const auto& s : ex.scores) ex.ranked.push_back(s.segment_id);
        ex.children = discover_subaspects(gateway, claim, node, tree.lineage(node.node_id),
                                          segment_texts(segments, ex.ranked), config.k_subaspects);
        return ex;
      });

      std::vector<std::string> next;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        const auto& id = frontier[i];
        auto& ex = expansions[i];
        if (ex.empty_pool) {
          log.push_back({"leaf", id, level, "empty pool"});
          continue;
        }
        tree.node(id).ranked_segments = ex.ranked;
        log.push_back({"rank", id, level, std::to_string(ex.ranked.size()) + " segments"});
        if (config.ranking_dump) append_ranking_dump(*config.ranking_dump, id, ex.scores);
        for (const auto& d : ex.children) next.push_back(tree.add_child(id, d));
        log.push_back({"discover", id, level, std::to_string(ex.children.size()) + " subaspects"});
      }
      frontier = std::move(next);
    }
  } catch (const std::exception& e) {
    tree.complete = false;
    tree.failure = e.what();
    result.failure = std::current_exception();
  }
  return result;
}

}  // namespace claimtree
