#include "claimtree/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "claimtree/hash.hpp"
#include "claimtree/parallel.hpp"

namespace claimtree::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  out << content;
}

json read_json(const fs::path& path) {
  json value = json::parse(read_file(path), nullptr, false);
  if (value.is_discarded()) throw Error(ErrorCode::UnreadableFile, "invalid JSON in " + path.string());
  return value;
}

// Sorted so concurrent call order does not leak into the file.
void write_call_log(const fs::path& path, const Gateway& gateway) {
  auto calls = gateway.call_log();
  std::sort(calls.begin(), calls.end(), [](const CallRecord& a, const CallRecord& b) {
    return std::tie(a.task, a.prompt_hash, a.retries) < std::tie(b.task, b.prompt_hash, b.retries);
  });
  std::ostringstream out;
  for (const auto& c : calls) {
    ordered_json j;
    j["task"] = to_string(c.task);
    j["prompt_hash"] = c.prompt_hash;
    j["retry"] = c.retries;
    j["ok"] = c.ok;
    if (!c.ok) j["error"] = c.error;
    out << j.dump() << '\n';
  }
  write_file(path, out.str());
}

}  // namespace

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config) {
  if (config.embedder == "hashed") return std::make_unique<HashedBowEmbedder>(config.embed_dim, config.seed);
  HttpEmbedderOptions options;
  options.endpoint = config.embed_endpoint;
  options.model = config.embed_model;
  options.api_key = env_or_empty(kEmbedKeyEnv);
  options.max_in_flight = config.concurrency;
  return std::make_unique<HttpEmbedder>(options);
}

std::unique_ptr<ChatProvider> make_provider(const PipelineConfig& config) {
  if (config.llm_provider == "mock") {
    if (config.mock_dir.empty()) throw Error(ErrorCode::InvalidArgument, "mock provider needs --mock-dir");
    return MockProvider::from_directory(config.mock_dir);
  }
  HttpChatOptions options;
  options.endpoint = config.llm_endpoint;
  options.model = config.llm_model;
  options.api_key = env_or_empty(kLlmKeyEnv);
  options.requests_per_second = config.llm_requests_per_second;
  return std::make_unique<HttpChatProvider>(options);
}

std::unique_ptr<Gateway> make_gateway(const PipelineConfig& config, ChatProvider& provider) {
  auto gateway = std::make_unique<Gateway>(provider, config.concurrency);
  for (const auto& [name, task] : config.tasks) gateway->set_task(task);
  return gateway;
}

IngestSummary run_ingest(const PipelineConfig& config, Embedder& embedder) {
  config.validate();
  const std::string corpus_bytes = read_file(config.corpus_path);
  auto docs = load_corpus(config.corpus_path);
  auto per_doc = parallel_map(docs.size(), config.concurrency, [&](std::size_t i) {
    return config.segmenter == "c99" ? segment_document(docs[i], config.c99)
                                     : segment_fixed_window(docs[i], config.segment_window);
  });
  std::vector<Segment> segments;
  for (auto& list : per_doc) {
    for (auto& s : list) segments.push_back(std::move(s));
  }
  std::vector<std::string> texts;
  for (const auto& s : segments) texts.push_back(s.text);
  auto vectors = embed_texts(embedder, texts);
  EmbeddingIndex index;
  for (std::size_t i = 0; i < segments.size(); ++i) index.add(segments[i].segment_id, vectors[i]);

  IngestSummary summary{docs.size(), segments.size(),
                        ingest_fingerprint(sha256_hex(corpus_bytes), config, embedder.describe())};
  fs::create_directories(config.output_dir);
  write_segment_store(config.output_dir / files::kSegments, segments);
  index.save(config.output_dir / files::kIndex, summary.fingerprint);
  ordered_json manifest;
  manifest["fingerprint"] = summary.fingerprint;
  manifest["corpus_sha256"] = sha256_hex(corpus_bytes);
  manifest["segmentation"] = config.segmentation_params();
  manifest["embedder"] = embedder.describe();
  manifest["documents"] = summary.documents;
  manifest["segments"] = summary.segments;
  write_file(config.output_dir / files::kIngestManifest, manifest.dump(2) + "\n");
  return summary;
}

IngestArtifacts load_ingest(const PipelineConfig& config, const Embedder& embedder) {
  const fs::path manifest_path = config.output_dir / files::kIngestManifest;
  if (!fs::exists(manifest_path) || !fs::exists(config.output_dir / files::kIndex)) {
    throw Error(ErrorCode::UnreadableFile, "no segment index in " + config.output_dir.string() +
                                               "; run `claimtree ingest` first");
  }
  json manifest = read_json(manifest_path);
  std::string corpus_sha = manifest.value("corpus_sha256", "");
  if (!config.corpus_path.empty() && fs::exists(config.corpus_path)) {
    std::string now = sha256_hex(read_file(config.corpus_path));
    if (now != corpus_sha) {
      throw Error(ErrorCode::FingerprintMismatch, "corpus changed since ingest; rerun `claimtree ingest`");
    }
  }
  IngestArtifacts out;
  out.fingerprint = ingest_fingerprint(corpus_sha, config, embedder.describe());
  if (manifest.value("fingerprint", "") != out.fingerprint) {
    throw Error(ErrorCode::FingerprintMismatch,
                "ingest artifacts in " + config.output_dir.string() +
                    " were produced with different segmentation or embedder settings");
  }
  std::string index_fp;
  out.index = EmbeddingIndex::load(config.output_dir / files::kIndex, &index_fp);
  if (index_fp != out.fingerprint) {
    throw Error(ErrorCode::FingerprintMismatch, "index fingerprint does not match ingest manifest");
  }
  out.segments = read_segment_store(config.output_dir / files::kSegments);
  return out;
}

BuildResult run_build(const PipelineConfig& config, Embedder& embedder, Gateway& gateway) {
  config.validate();
  if (config.claim.empty()) throw Error(ErrorCode::InvalidArgument, "a claim is required (--claim)");
  auto ingest = load_ingest(config, embedder);
  const std::string fingerprint = pipeline_fingerprint(ingest.fingerprint, config);

  HierarchyConfig hc = config.hierarchy;
  hc.concurrency = config.concurrency;
  hc.ranking_dump = config.output_dir / files::kRankingDump;
  fs::remove(*hc.ranking_dump);
  CachingEmbedder cached(embedder);
  gateway.clear_log();
  auto result = build_hierarchy(config.claim, ingest.index, to_segment_map(ingest.segments), cached,
                                gateway, hc);
  result.tree.config_fingerprint = fingerprint;
  result.tree.save(config.output_dir / files::kHierarchy);

  std::ostringstream log;
  ordered_json head;
  head["config_fingerprint"] = fingerprint;
  head["status"] = result.tree.complete ? "complete" : "partial";
  log << head.dump() << '\n';
  for (const auto& e : result.log) log << to_json(e).dump() << '\n';
  write_file(config.output_dir / files::kBuildLog, log.str());
  write_call_log(config.output_dir / "llm_calls.build.jsonl", gateway);

  if (result.failure) std::rethrow_exception(result.failure);
  return result;
}

PerspectiveRun run_perspectives(const PipelineConfig& config, Embedder& embedder, Gateway& gateway) {
  config.validate();
  const fs::path hierarchy_path = config.output_dir / files::kHierarchy;
  if (!fs::exists(hierarchy_path)) {
    throw Error(ErrorCode::UnreadableFile, "no hierarchy in " + config.output_dir.string() +
                                               "; run `claimtree build` first");
  }
  auto tree = AspectHierarchy::load(hierarchy_path);
  auto ingest = load_ingest(config, embedder);
  const std::string fingerprint = pipeline_fingerprint(ingest.fingerprint, config);
  if (tree.config_fingerprint != fingerprint) {
    throw Error(ErrorCode::FingerprintMismatch,
                "hierarchy.json was built with different settings; rerun `claimtree build`");
  }
  if (!tree.complete) throw Error(ErrorCode::InvalidArgument, "hierarchy.json is partial: " + tree.failure);

  PerspectiveConfig pc;
  pc.filter = config.filter;
  pc.relative_threshold = config.relative_threshold;
  pc.concurrency = config.concurrency;
  CachingEmbedder cached(embedder);
  gateway.clear_log();
  auto run = discover_perspectives(tree, ingest.segments, ingest.index, cached, gateway, pc);

  auto doc = tree.to_json();
  ordered_json filter;
  filter["eligible_segments"] = run.eligible;
  filter["boundary"] = run.boundary.boundary;
  filter["judged"] = run.boundary.judged;
  filter["retained"] = run.retained;
  doc["relevance_filter"] = std::move(filter);
  write_file(config.output_dir / files::kPerspectives, doc.dump(2) + "\n");
  write_file(config.output_dir / files::kConsensus, consensus_csv(tree));
  write_call_log(config.output_dir / "llm_calls.perspectives.jsonl", gateway);
  return run;
}

MetricReport run_evaluate(const PipelineConfig& config, Gateway& gateway,
                          const fs::path& hierarchy_path) {
  auto tree = AspectHierarchy::load(hierarchy_path);
  SegmentMap segments;
  const fs::path store = config.output_dir / files::kSegments;
  if (fs::exists(store)) segments = to_segment_map(read_segment_store(store));
  auto report = evaluate_hierarchy(gateway, tree, segments, config.concurrency);

  fs::create_directories(config.output_dir);
  ordered_json doc;
  doc["claim"] = tree.claim();
  doc["config_fingerprint"] = tree.config_fingerprint;
  auto body = report.to_json();
  for (auto& [k, v] : body.items()) doc[k] = v;
  write_file(config.output_dir / files::kMetricsJson, doc.dump(2) + "\n");
  write_file(config.output_dir / files::kMetricsTable, report.table());
  return report;
}

PairwiseResult run_pairwise(const PipelineConfig& config, Gateway& gateway, const fs::path& a,
                            const fs::path& b) {
  auto first = AspectHierarchy::load(a);
  auto second = AspectHierarchy::load(b);
  auto result = pairwise_compare(gateway, first, second);
  fs::create_directories(config.output_dir);
  ordered_json doc;
  doc["claim"] = first.claim();
  doc["a_fingerprint"] = first.config_fingerprint;
  doc["b_fingerprint"] = second.config_fingerprint;
  auto body = result.to_json();
  for (auto& [k, v] : body.items()) doc[k] = v;
  write_file(config.output_dir / files::kPairwise, doc.dump(2) + "\n");
  return result;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::Timeout:
      return 2;
    case ErrorCode::SchemaViolation:
    case ErrorCode::MissingFixture:
    case ErrorCode::EmptyAspectList:
    case ErrorCode::TooFewSubaspects:
    case ErrorCode::JudgeFailure:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ZeroVector:
    case ErrorCode::EmptyList:
    case ErrorCode::EmptyKeywordSet:
    case ErrorCode::EmptyPool:
    case ErrorCode::NoCoarseAspects:
      return 3;
    default:
      return 1;
  }
}

}  // namespace claimtree::pipeline
