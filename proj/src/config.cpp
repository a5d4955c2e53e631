#include "claimtree/config.hpp"

#include <fstream>
#include <set>

#include "claimtree/error.hpp"
#include "claimtree/hash.hpp"

namespace claimtree {

using nlohmann::json;
using nlohmann::ordered_json;

PipelineConfig::PipelineConfig() {
  for (TaskName t : kAllTasks) tasks[t] = default_task(t);
}

void PipelineConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  hierarchy.validate();
  filter.validate();
  if (segmenter != "c99" && segmenter != "window") bad("segmenter must be c99 or window");
  if (segment_window == 0) bad("segment_window must be >= 1");
  if (c99.mask_size == 0 || c99.min_segment_sentences == 0) bad("c99 mask and minimum length must be >= 1");
  if (!(relative_threshold > 0.0 && relative_threshold <= 1.0)) bad("relative_threshold must lie in (0,1]");
  if (llm_provider != "mock" && llm_provider != "http") bad("llm_provider must be mock or http");
  if (embedder != "hashed" && embedder != "http") bad("embedder must be hashed or http");
  if (embed_dim == 0) bad("embed_dim must be >= 1");
  if (concurrency == 0) bad("concurrency must be >= 1");
  for (const auto& [name, task] : tasks) {
    if (task.temperature < 0.0 || !(task.top_p > 0.0 && task.top_p <= 1.0)) {
      bad("invalid sampling parameters for " + std::string(to_string(name)));
    }
  }
}

namespace {

template <typename T>
void take(const json& obj, const char* key, T& target, std::set<std::string>& seen) {
  seen.insert(key);
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config key ") + key + ": " + e.what());
  }
}

void take_path(const json& obj, const char* key, std::filesystem::path& target, std::set<std::string>& seen) {
  std::string s = target.string();
  take(obj, key, s, seen);
  target = s;
}

}  // namespace

void PipelineConfig::merge_json(const json& file) {
  if (!file.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  std::set<std::string> seen;
  take(file, "claim", claim, seen);
  take_path(file, "corpus_path", corpus_path, seen);
  take_path(file, "output_dir", output_dir, seen);
  take(file, "segmenter", segmenter, seen);
  take(file, "segment_window", segment_window, seen);
  take(file, "c99_mask_size", c99.mask_size, seen);
  take(file, "c99_min_relative_gain", c99.min_relative_gain, seen);
  take(file, "c99_min_segment_sentences", c99.min_segment_sentences, seen);
  take(file, "c99_max_segments", c99.max_segments, seen);
  take(file, "max_depth", hierarchy.max_depth, seen);
  take(file, "k_aspects", hierarchy.k_aspects, seen);
  take(file, "k_subaspects", hierarchy.k_subaspects, seen);
  take(file, "k_keywords", hierarchy.k_keywords, seen);
  take(file, "n_enrich", hierarchy.n_enrich, seen);
  take(file, "pool_size", hierarchy.ranking.pool_size, seen);
  take(file, "k_segments", hierarchy.ranking.k_segments, seen);
  take(file, "beta", hierarchy.ranking.beta, seen);
  take(file, "gamma", hierarchy.ranking.gamma, seen);
  take(file, "epsilon", hierarchy.ranking.epsilon, seen);
  take(file, "delta", filter.delta, seen);
  take(file, "window", filter.window, seen);
  take(file, "min_chars", filter.min_chars, seen);
  take(file, "relative_threshold", relative_threshold, seen);
  take(file, "llm_provider", llm_provider, seen);
  take_path(file, "mock_dir", mock_dir, seen);
  take(file, "llm_endpoint", llm_endpoint, seen);
  take(file, "llm_model", llm_model, seen);
  take(file, "llm_requests_per_second", llm_requests_per_second, seen);
  take(file, "embedder", embedder, seen);
  take(file, "embed_dim", embed_dim, seen);
  take(file, "embed_endpoint", embed_endpoint, seen);
  take(file, "embed_model", embed_model, seen);
  take(file, "concurrency", concurrency, seen);
  take(file, "seed", seed, seen);
  seen.insert("tasks");
  if (file.contains("tasks")) {
    for (const auto& [name, params] : file["tasks"].items()) {
      auto& task = tasks[parse_task(name)];
      task.temperature = params.value("temperature", task.temperature);
      task.top_p = params.value("top_p", task.top_p);
      task.max_retries = params.value("max_retries", task.max_retries);
    }
  }
  for (const auto& [key, value] : file.items()) {
    if (!seen.contains(key)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read config " + path.string());
  json value = json::parse(in, nullptr, false);
  if (value.is_discarded()) throw Error(ErrorCode::UnreadableFile, "invalid JSON in config " + path.string());
  PipelineConfig config;
  config.merge_json(value);
  return config;
}

ordered_json PipelineConfig::segmentation_params() const {
  ordered_json j;
  j["segmenter"] = segmenter;
  if (segmenter == "c99") {
    j["mask_size"] = c99.mask_size;
    j["min_relative_gain"] = c99.min_relative_gain;
    j["min_segment_sentences"] = c99.min_segment_sentences;
    j["max_segments"] = c99.max_segments;
  } else {
    j["window"] = segment_window;
  }
  return j;
}

ordered_json PipelineConfig::pipeline_params() const {
  ordered_json j;
  j["claim"] = claim;
  j["max_depth"] = hierarchy.max_depth;
  j["k_aspects"] = hierarchy.k_aspects;
  j["k_subaspects"] = hierarchy.k_subaspects;
  j["k_keywords"] = hierarchy.k_keywords;
  j["n_enrich"] = hierarchy.n_enrich;
  j["pool_size"] = hierarchy.ranking.pool_size;
  j["k_segments"] = hierarchy.ranking.k_segments;
  j["beta"] = hierarchy.ranking.beta;
  j["gamma"] = hierarchy.ranking.gamma;
  j["epsilon"] = hierarchy.ranking.epsilon;
  j["delta"] = filter.delta;
  j["window"] = filter.window;
  j["min_chars"] = filter.min_chars;
  j["relative_threshold"] = relative_threshold;
  j["llm_provider"] = llm_provider;
  j["llm_model"] = llm_model;
  ordered_json t;
  for (const auto& [name, task] : tasks) {
    t[std::string(to_string(name))] = {{"temperature", task.temperature},
                                       {"top_p", task.top_p},
                                       {"max_retries", task.max_retries}};
  }
  j["tasks"] = std::move(t);
  return j;
}

std::string ingest_fingerprint(const std::string& corpus_sha256, const PipelineConfig& config,
                               const std::string& embedder_description) {
  ordered_json j;
  j["corpus_sha256"] = corpus_sha256;
  j["segmentation"] = config.segmentation_params();
  j["embedder"] = embedder_description;
  return sha256_hex(j.dump());
}

std::string pipeline_fingerprint(const std::string& ingest_fp, const PipelineConfig& config) {
  ordered_json j;
  j["ingest"] = ingest_fp;
  j["pipeline"] = config.pipeline_params();
  return sha256_hex(j.dump());
}

}  // namespace claimtree
