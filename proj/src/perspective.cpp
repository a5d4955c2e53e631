#include "claimtree/perspective.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "claimtree/error.hpp"
#include "claimtree/parallel.hpp"
#include "claimtree/prompts.hpp"

namespace claimtree {

using nlohmann::json;

void FilterParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
}

std::string_view to_string(Stance stance) {
  switch (stance) {
    case Stance::Supports: return prompts::kSupports;
    case Stance::Neutral: return prompts::kNeutral;
    case Stance::Opposes: return prompts::kOpposes;
    case Stance::Irrelevant: return prompts::kIrrelevant;
  }
  return "";
}

Stance parse_stance(std::string_view label) {
  for (Stance s : {Stance::Supports, Stance::Neutral, Stance::Opposes, Stance::Irrelevant}) {
    if (to_string(s) == label) return s;
  }
  throw Error(ErrorCode::SchemaViolation, "unknown stance label '" + std::string(label) + "'");
}

std::string claim_aspect_query(const std::string& aspect_label, const std::string& claim) {
  return aspect_label + " with respect to " + claim;
}

EmbeddingVector claim_representation(Embedder& embedder, const std::string& claim,
                                     const std::vector<std::string>& coarse_labels) {
  if (coarse_labels.empty()) throw Error(ErrorCode::NoCoarseAspects, "claim has no coarse aspects");
  std::vector<std::string> texts{claim};
  for (const auto& label : coarse_labels) texts.push_back(claim_aspect_query(label, claim));
  auto vectors = embed_texts(embedder, texts);
  const std::size_t dim = vectors.front().dim();
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 1; i < vectors.size(); ++i) {
    auto v = vectors[i].values();
    for (std::size_t d = 0; d < dim; ++d) mean[d] += v[d];
  }
  std::vector<double> combined(dim);
  auto head = vectors.front().values();
  for (std::size_t d = 0; d < dim; ++d) {
    combined[d] = 0.5 * (head[d] + mean[d] / static_cast<double>(coarse_labels.size()));
  }
  return EmbeddingVector::normalized(std::move(combined));
}

BoundaryResult relevance_boundary(std::size_t count, const RankJudge& judge,
                                  const FilterParams& params, std::size_t workers) {
  params.validate();
  BoundaryResult result;
  std::vector<signed char> verdict(count, -1);
  auto window_fraction = [&](std::size_t i) {
    std::size_t lo = i >= params.window ? i - params.window : 0;
    std::size_t hi = std::min(count - 1, i + params.window);
    std::vector<std::size_t> missing;
    for (std::size_t r = lo; r <= hi; ++r) {
      if (verdict[r] < 0) missing.push_back(r);
    }
    auto answers = parallel_map(missing.size(), workers,
                                [&](std::size_t k) { return judge(missing[k]) ? 1 : 0; });
    for (std::size_t k = 0; k < missing.size(); ++k) verdict[missing[k]] = static_cast<signed char>(answers[k]);
    result.judged += missing.size();
    ++result.probes;
    std::size_t relevant = 0;
    for (std::size_t r = lo; r <= hi; ++r) relevant += static_cast<std::size_t>(verdict[r]);
    return static_cast<double>(relevant) / static_cast<double>(hi - lo + 1);
  };
  std::size_t lo = 0;
  std::size_t hi = count;
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (window_fraction(mid) < params.delta) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  result.boundary = lo;
  return result;
}

TaxonomyClassifier::TaxonomyClassifier(const AspectHierarchy& tree, Embedder& embedder,
                                       double relative_threshold)
    : tree_(tree), relative_threshold_(relative_threshold) {
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (const auto& n : tree.nodes()) {
    if (!n.parent) continue;
    ids.push_back(n.node_id);
    texts.push_back(node_text(n));
  }
  if (texts.empty()) return;
  auto vectors = embed_texts(embedder, texts);
  for (std::size_t i = 0; i < ids.size(); ++i) node_vectors_.emplace(ids[i], std::move(vectors[i]));
}

std::string TaxonomyClassifier::node_text(const AspectNode& node) {
  std::string out = node.label + ": " + node.description;
  if (!node.keywords.empty()) {
    out += " Keywords:";
    for (std::size_t i = 0; i < node.keywords.size(); ++i) out += (i ? ", " : " ") + node.keywords[i];
  }
  return out;
}

std::vector<std::string> TaxonomyClassifier::classify(const EmbeddingVector& segment) const {
  std::vector<std::string> out;
  descend(tree_.root().node_id, segment, out);
  return out;
}

void TaxonomyClassifier::descend(const std::string& node_id, const EmbeddingVector& segment,
                                 std::vector<std::string>& out) const {
  const auto& node = tree_.node(node_id);
  std::vector<double> sims;
  double best = 0.0;
  for (const auto& c : node.children) {
    sims.push_back(cosine_similarity(segment, node_vectors_.at(c)));
    best = std::max(best, sims.back());
  }
  if (node.children.empty() || best <= 0.0) {
    out.push_back(node_id);
    return;
  }
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    if (sims[i] >= relative_threshold_ * best) descend(node.children[i], segment, out);
  }
}

namespace {

bool is_contract_failure(const Error& e) {
  return e.code() == ErrorCode::SchemaViolation || e.code() == ErrorCode::MissingFixture;
}

}  // namespace

bool judge_relevance(Gateway& gateway, const Segment& segment, const std::string& claim,
                     const std::vector<std::string>& aspects) {
  try {
    json reply = gateway.complete_json(prompts::relevance_judge(segment.text, claim, aspects));
    return reply.at("answer").get<std::string>() == "Yes";
  } catch (const Error& e) {
    if (!is_contract_failure(e)) throw;
    throw Error(ErrorCode::JudgeFailure, "relevance of segment " + segment.segment_id + ": " + e.what());
  }
}

Stance detect_stance(Gateway& gateway, const Segment& segment, const AspectHierarchy& tree,
                     const std::string& node_id) {
  const auto& node = tree.node(node_id);
  try {
    json reply = gateway.complete_json(prompts::stance_detect(
        segment.text, tree.claim(), node.label, node.description, tree.lineage(node_id)));
    return parse_stance(reply.at("stance").get<std::string>());
  } catch (const Error& e) {
    if (!is_contract_failure(e)) throw;
    throw Error(ErrorCode::SchemaViolation,
                "stance for (segment " + segment.segment_id + ", node " + node_id + "): " + e.what());
  }
}

PerspectiveSet summarize_perspectives(Gateway& gateway, const AspectHierarchy& tree,
                                      const std::string& node_id, const StanceBuckets& buckets,
                                      const SegmentMap& segments, std::size_t workers) {
  const auto& node = tree.node(node_id);
  const std::array<const std::vector<std::string>*, 3> ids = {&buckets.support, &buckets.neutral,
                                                              &buckets.oppose};
  const std::array<Stance, 3> stances = {Stance::Supports, Stance::Neutral, Stance::Opposes};
  auto filled = parallel_map(3, workers, [&](std::size_t b) {
    StanceBucket out;
    out.segment_ids = *ids[b];
    std::vector<std::string> texts;
    std::set<std::string> seen;
    for (const auto& sid : out.segment_ids) {
      const auto& seg = segments.at(sid);
      texts.push_back(seg.text);
      if (seen.insert(seg.doc_id).second) out.paper_ids.push_back(seg.doc_id);
    }
    if (texts.empty()) return out;
    try {
      json reply = gateway.complete_json(prompts::perspective_summarize(
          tree.claim(), node.label, node.description, tree.lineage(node_id),
          std::string(to_string(stances[b])), texts));
      out.summary = reply.at("summary").get<std::string>();
    } catch (const Error& e) {
      if (!is_contract_failure(e)) throw;
      throw Error(ErrorCode::SchemaViolation, "summary for node " + node_id + " (" +
                                                  std::string(to_string(stances[b])) + "): " + e.what());
    }
    return out;
  });
  return {std::move(filled[0]), std::move(filled[1]), std::move(filled[2])};
}

Consensus consensus_counts(const AspectHierarchy& tree, const std::string& node_id) {
  Consensus c;
  const auto& node = tree.node(node_id);
  if (node.perspectives) {
    c.segments = {node.perspectives->support.segment_ids.size(),
                  node.perspectives->neutral.segment_ids.size(),
                  node.perspectives->oppose.segment_ids.size()};
    c.papers = {node.perspectives->support.paper_ids.size(),
                node.perspectives->neutral.paper_ids.size(),
                node.perspectives->oppose.paper_ids.size()};
  }
  std::array<std::set<std::string>, 3> seg_union;
  std::array<std::set<std::string>, 3> paper_union;
  std::deque<std::string> queue{node_id};
  while (!queue.empty()) {
    const auto& n = tree.node(queue.front());
    queue.pop_front();
    for (const auto& child : n.children) queue.push_back(child);
    if (!n.perspectives) continue;
    const std::array<const StanceBucket*, 3> b = {&n.perspectives->support, &n.perspectives->neutral,
                                                  &n.perspectives->oppose};
    for (std::size_t k = 0; k < 3; ++k) {
      seg_union[k].insert(b[k]->segment_ids.begin(), b[k]->segment_ids.end());
      paper_union[k].insert(b[k]->paper_ids.begin(), b[k]->paper_ids.end());
    }
  }
  c.subtree_segments = {seg_union[0].size(), seg_union[1].size(), seg_union[2].size()};
  c.subtree_papers = {paper_union[0].size(), paper_union[1].size(), paper_union[2].size()};
  return c;
}

std::string consensus_ratio(const StanceCounts& counts) {
  const double total = static_cast<double>(counts.total());
  auto pct = [&](std::size_t v) {
    return total == 0.0 ? 0L : std::lround(100.0 * static_cast<double>(v) / total);
  };
  return std::to_string(pct(counts.support)) + ":" + std::to_string(pct(counts.neutral)) + ":" +
         std::to_string(pct(counts.oppose));
}

PerspectiveRun discover_perspectives(AspectHierarchy& tree, const std::vector<Segment>& segments,
                                     const EmbeddingIndex& index, Embedder& embedder,
                                     Gateway& gateway, const PerspectiveConfig& config) {
  config.filter.validate();
  PerspectiveRun run;
  const auto seg_map = to_segment_map(segments);
  std::vector<std::string> coarse;
  for (const auto& c : tree.root().children) coarse.push_back(tree.node(c).label);
  auto claim_vec = claim_representation(embedder, tree.claim(), coarse);

  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& seg : segments) {
    if (seg.is_short(config.filter.min_chars) || !index.contains(seg.segment_id)) continue;
    ranked.emplace_back(cosine_similarity(index.at(seg.segment_id), claim_vec), seg.segment_id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  run.eligible = ranked.size();

  run.boundary = relevance_boundary(
      ranked.size(),
      [&](std::size_t rank) {
        return judge_relevance(gateway, seg_map.at(ranked[rank].second), tree.claim(), coarse);
      },
      config.filter, config.concurrency);
  for (std::size_t i = 0; i < run.boundary.boundary; ++i) run.retained.push_back(ranked[i].second);
  if (run.retained.empty()) run.warnings.push_back("no claim-relevant segments retained");

  for (const auto& n : tree.nodes()) {
    auto& node = tree.node(n.node_id);
    node.attached_segments.clear();
    node.perspectives.reset();
  }
  if (!run.retained.empty()) {
    TaxonomyClassifier classifier(tree, embedder, config.relative_threshold);
    for (const auto& sid : run.retained) {
      for (const auto& nid : classifier.classify(index.at(sid))) {
        tree.node(nid).attached_segments.push_back(sid);
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> pairs;  // (node, segment)
  for (const auto& n : tree.nodes()) {
    for (const auto& sid : n.attached_segments) pairs.emplace_back(n.node_id, sid);
  }
  auto stances = parallel_map(pairs.size(), config.concurrency, [&](std::size_t i) {
    return detect_stance(gateway, seg_map.at(pairs[i].second), tree, pairs[i].first);
  });

  std::map<std::string, StanceBuckets> buckets;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto& b = buckets[pairs[i].first];
    switch (stances[i]) {
      case Stance::Supports: b.support.push_back(pairs[i].second); break;
      case Stance::Neutral: b.neutral.push_back(pairs[i].second); break;
      case Stance::Opposes: b.oppose.push_back(pairs[i].second); break;
      case Stance::Irrelevant: break;
    }
  }

  std::vector<std::string> node_ids;
  for (const auto& n : tree.nodes()) node_ids.push_back(n.node_id);
  auto sets = parallel_map(node_ids.size(), config.concurrency, [&](std::size_t i) {
    auto it = buckets.find(node_ids[i]);
    if (it == buckets.end()) return PerspectiveSet{};
    return summarize_perspectives(gateway, tree, node_ids[i], it->second, seg_map);
  });
  for (std::size_t i = 0; i < node_ids.size(); ++i) tree.node(node_ids[i]).perspectives = std::move(sets[i]);
  return run;
}

std::string consensus_csv(const AspectHierarchy& tree) {
  std::ostringstream out;
  out << "node_id,stance,count,paper_count,subtree_count,subtree_paper_count\n";
  for (const auto& n : tree.nodes()) {
    auto c = consensus_counts(tree, n.node_id);
    const std::array<const char*, 3> names = {"support", "neutral", "oppose"};
    const std::array<std::size_t StanceCounts::*, 3> fields = {&StanceCounts::support, &StanceCounts::neutral,
                                                               &StanceCounts::oppose};
    for (std::size_t k = 0; k < 3; ++k) {
      out << n.node_id << ',' << names[k] << ',' << c.segments.*fields[k] << ',' << c.papers.*fields[k]
          << ',' << c.subtree_segments.*fields[k] << ',' << c.subtree_papers.*fields[k] << '\n';
    }
  }
  return out.str();
}

}  // namespace claimtree
