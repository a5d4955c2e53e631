#pragma once

#include <cstddef>
#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "claimtree/config.hpp"
#include "claimtree/corpus.hpp"
#include "claimtree/embedding.hpp"
#include "claimtree/error.hpp"
#include "claimtree/evaluation.hpp"
#include "claimtree/hierarchy.hpp"
#include "claimtree/llm.hpp"
#include "claimtree/perspective.hpp"

// Staged driver: ingest -> build -> perspectives -> evaluate. Every stage reads
// and writes files under PipelineConfig::output_dir.
namespace claimtree::pipeline {

namespace files {
inline constexpr const char* kSegments = "segments.jsonl";
inline constexpr const char* kIndex = "index";
inline constexpr const char* kIngestManifest = "ingest_manifest.json";
inline constexpr const char* kHierarchy = "hierarchy.json";
inline constexpr const char* kBuildLog = "build_log.jsonl";
inline constexpr const char* kRankingDump = "ranking.tsv";
inline constexpr const char* kPerspectives = "perspectives.json";
inline constexpr const char* kConsensus = "consensus.csv";
inline constexpr const char* kMetricsJson = "metrics.json";
inline constexpr const char* kMetricsTable = "metrics.txt";
inline constexpr const char* kPairwise = "pairwise.json";
}  // namespace files

std::unique_ptr<Embedder> make_embedder(const PipelineConfig& config);
std::unique_ptr<ChatProvider> make_provider(const PipelineConfig& config);
std::unique_ptr<Gateway> make_gateway(const PipelineConfig& config, ChatProvider& provider);

struct IngestSummary {
  std::size_t documents = 0;
  std::size_t segments = 0;
  std::string fingerprint;
};

IngestSummary run_ingest(const PipelineConfig& config, Embedder& embedder);

struct IngestArtifacts {
  std::vector<Segment> segments;
  EmbeddingIndex index;
  std::string fingerprint;
};

// Throws Error(UnreadableFile) when ingest has not run and
// Error(FingerprintMismatch) when the artifacts came from other settings.
IngestArtifacts load_ingest(const PipelineConfig& config, const Embedder& embedder);

// Persists the (possibly partial) tree and the operation log, then rethrows
// any build failure.
BuildResult run_build(const PipelineConfig& config, Embedder& embedder, Gateway& gateway);

PerspectiveRun run_perspectives(const PipelineConfig& config, Embedder& embedder, Gateway& gateway);

// All hierarchy files are loaded before any judge call.
MetricReport run_evaluate(const PipelineConfig& config, Gateway& gateway,
                          const std::filesystem::path& hierarchy_path);
PairwiseResult run_pairwise(const PipelineConfig& config, Gateway& gateway,
                            const std::filesystem::path& a, const std::filesystem::path& b);

// 1 usage/input error, 2 provider failure, 3 schema or contract violation.
int exit_code(ErrorCode code);

}  // namespace claimtree::pipeline
