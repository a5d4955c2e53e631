#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "claimtree/llm.hpp"

// Prompt templates and reply shapes for every LLM task.
namespace claimtree::prompts {

// Keywords attached to every freshly proposed aspect or subaspect.
inline constexpr std::size_t kSeedKeywords = 10;

inline constexpr const char* kSupports = "supports_claim";
inline constexpr const char* kNeutral = "neutral_to_claim";
inline constexpr const char* kOpposes = "opposes_claim";
inline constexpr const char* kIrrelevant = "irrelevant_to_claim";

// "claim -> aspect -> subaspect"
std::string render_path(const std::vector<std::string>& labels);

PromptInstance coarse_aspects(const std::string& claim, std::size_t k_aspects);

PromptInstance keyword_extract(const std::string& claim, const std::string& aspect,
                               const std::string& description, std::size_t max_keywords,
                               const std::vector<std::string>& contents);

// Reply check requires at least `k_keywords` distinct (case-insensitive) terms.
PromptInstance keyword_filter(const std::string& claim, const std::string& aspect,
                              const std::string& description, std::size_t k_keywords,
                              const std::vector<std::string>& candidates);

PromptInstance subaspect_discovery(const std::string& claim, const std::string& aspect,
                                   const std::string& description,
                                   const std::vector<std::string>& path, std::size_t k_subaspects,
                                   const std::vector<std::string>& segments);

PromptInstance relevance_judge(const std::string& segment, const std::string& claim,
                               const std::vector<std::string>& aspects);

PromptInstance stance_detect(const std::string& segment, const std::string& claim,
                             const std::string& aspect, const std::string& description,
                             const std::vector<std::string>& path);

PromptInstance perspective_summarize(const std::string& claim, const std::string& aspect,
                                     const std::string& description,
                                     const std::vector<std::string>& path,
                                     const std::string& stance,
                                     const std::vector<std::string>& segments);

PromptInstance node_relevance(const std::string& claim, const std::vector<std::string>& path);
PromptInstance path_granularity(const std::string& claim, const std::vector<std::string>& path);
PromptInstance sibling_granularity(const std::string& claim, const std::string& parent,
                                   const std::vector<std::string>& siblings);
PromptInstance uniqueness(const std::string& claim, const std::string& taxonomy,
                          const std::vector<std::string>& path);
PromptInstance segment_quality(const std::string& claim, const std::vector<std::string>& path,
                               const std::string& segment);
PromptInstance pairwise(const std::string& claim, const std::string& first_taxonomy,
                        const std::string& second_taxonomy);

// Lowercased, trimmed, internal whitespace collapsed; used for keyword dedup.
std::string keyword_key(const std::string& keyword);

}  // namespace claimtree::prompts
