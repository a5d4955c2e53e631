#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "claimtree/corpus.hpp"
#include "claimtree/hierarchy.hpp"
#include "claimtree/llm.hpp"
#include "claimtree/perspective.hpp"

namespace claimtree {

struct PipelineConfig {
  std::string claim;
  std::filesystem::path corpus_path;
  std::filesystem::path output_dir = "out";

  std::string segmenter = "c99";  // c99 | window
  C99Params c99;
  std::size_t segment_window = 5;

  HierarchyConfig hierarchy;
  FilterParams filter;
  double relative_threshold = 0.9;

  std::string llm_provider = "mock";  // mock | http
  std::filesystem::path mock_dir;
  std::string llm_endpoint;
  std::string llm_model;
  double llm_requests_per_second = 0.0;
  std::map<TaskName, LlmTask> tasks;  // every task, defaults filled in

  std::string embedder = "hashed";  // hashed | http
  std::size_t embed_dim = 256;
  std::string embed_endpoint;
  std::string embed_model;

  std::size_t concurrency = 4;
  std::uint64_t seed = 0;

  PipelineConfig();

  // Throws Error(InvalidArgument).
  void validate() const;

  // Applies keys present in `file` on top of the current values. Unknown keys
  // are rejected with Error(InvalidArgument).
  void merge_json(const nlohmann::json& file);
  static PipelineConfig from_file(const std::filesystem::path& path);

  // Effective parameters as JSON; paths, concurrency and secrets excluded.
  nlohmann::ordered_json segmentation_params() const;
  nlohmann::ordered_json pipeline_params() const;
};

// Hash of corpus content, segmentation parameters and embedder identity.
std::string ingest_fingerprint(const std::string& corpus_sha256, const PipelineConfig& config,
                               const std::string& embedder_description);
// Ingest fingerprint extended by every hierarchy, ranking, filter and LLM parameter.
std::string pipeline_fingerprint(const std::string& ingest_fp, const PipelineConfig& config);

// Provider secrets come only from the environment.
inline constexpr const char* kLlmKeyEnv = "CLAIMTREE_LLM_API_KEY";
inline constexpr const char* kEmbedKeyEnv = "CLAIMTREE_EMBED_API_KEY";

}  // namespace claimtree
