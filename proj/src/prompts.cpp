#include "claimtree/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "claimtree/text.hpp"

namespace claimtree::prompts {

using nlohmann::json;

namespace {

Schema aspect_list_schema(const char* key, std::size_t max_items) {
  auto aspect = Schema::object({
      {"label", Schema::string(true)},
      {"description", Schema::string()},
      {"keywords", Schema::array(Schema::string(true), kSeedKeywords, kSeedKeywords)},
  });
  return Schema::object({{key, Schema::array(std::move(aspect), 0, max_items)}});
}

std::string numbered(const std::vector<std::string>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) out << "[" << (i + 1) << "] " << items[i] << "\n";
  return out.str();
}

std::string joined(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : sep) + s;
  return out;
}

PromptInstance make(TaskName task, std::string text, Schema schema, ReplyCheck check = {}) {
  text += "\nOutput format (JSON): " + schema.describe().dump();
  return {task, std::move(text), std::move(schema), std::move(check)};
}

Schema binary_score() {
  return Schema::object({{"score", Schema::integer(0, 1)}});
}

}  // namespace

std::string render_path(const std::vector<std::string>& labels) { return joined(labels, " -> "); }

std::string keyword_key(const std::string& keyword) {
  std::string s = text::normalize_whitespace(keyword);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

PromptInstance coarse_aspects(const std::string& claim, std::size_t k_aspects) {
  std::ostringstream p;
  p << "For the topic, " << claim << ", output the list of up to " << k_aspects
    << " aspects in JSON format.\n"
    << "For each aspect give its label, a description of its significance to the topic, and a "
       "list of exactly "
    << kSeedKeywords << " relevant keywords.\n";
  return make(TaskName::CoarseAspects, p.str(), aspect_list_schema("aspects", k_aspects));
}

PromptInstance keyword_extract(const std::string& claim, const std::string& aspect,
                               const std::string& description, std::size_t max_keywords,
                               const std::vector<std::string>& contents) {
  std::ostringstream p;
  p << "The claim is: " << claim << ". You are analyzing it with a focus on the aspect " << aspect
    << ". The aspect, " << aspect << ", can be described as the following: " << description << "\n"
    << "Please extract at most " << max_keywords << " keywords related to the aspect " << aspect
    << " from the following documents:\n"
    << numbered(contents)
    << "Ensure that the extracted keywords are diverse, specific, and highly relevant to the given "
       "aspect. Only output the keywords.\n"
    << "Your output should be in JSON format.\n";
  return make(TaskName::KeywordExtract, p.str(),
              Schema::object({{"keywords", Schema::array(Schema::string(true), 1)}}));
}

PromptInstance keyword_filter(const std::string& claim, const std::string& aspect,
                              const std::string& description, std::size_t k_keywords,
                              const std::vector<std::string>& candidates) {
  std::ostringstream p;
  p << "Our claim is '" << claim << "'. With respect to the target aspect '" << aspect
    << "', identify " << k_keywords << " to " << k_keywords
    << " relevant keywords from the provided list: " << joined(candidates, ", ") << ".\n"
    << aspect << ": " << description << "\n"
    << "Merge terms with similar meanings, exclude relatively irrelevant ones, and output only the "
       "final keywords, most significant first.\n"
    << "Your output should be in JSON format.\n";
  ReplyCheck check = [k_keywords](const json& reply) -> std::optional<std::string> {
    std::set<std::string> distinct;
    for (const auto& kw : reply.at("keywords")) distinct.insert(keyword_key(kw.get<std::string>()));
    if (distinct.size() < k_keywords) {
      return "expected " + std::to_string(k_keywords) + " distinct keywords, got " +
             std::to_string(distinct.size());
    }
    return std::nullopt;
  };
  return make(TaskName::KeywordFilter, p.str(),
              Schema::object({{"keywords", Schema::array(Schema::string(true), 1)}}), check);
}

PromptInstance subaspect_discovery(const std::string& claim, const std::string& aspect,
                                   const std::string& description,
                                   const std::vector<std::string>& path, std::size_t k_subaspects,
                                   const std::vector<std::string>& segments) {
  std::ostringstream p;
  p << "Output the list of up to " << k_subaspects << " subaspects of parent aspect " << aspect
    << " that would be considered when evaluating the claim, " << claim << ".\n"
    << "claim: " << claim << "\n"
    << "parent_aspect: " << aspect << "; " << description << "\n"
    << "path_to_parent_aspect: " << render_path(path) << "\n"
    << "Ground the subaspects in the following corpus segments:\n"
    << numbered(segments)
    << "Give at least 2 subaspects. For each subaspect give its label, a description, and exactly "
    << kSeedKeywords << " keywords.\n"
    << "Provide your output in the following JSON format.\n";
  return make(TaskName::SubaspectDiscovery, p.str(), aspect_list_schema("subaspects", k_subaspects));
}

PromptInstance relevance_judge(const std::string& segment, const std::string& claim,
                               const std::vector<std::string>& aspects) {
  std::ostringstream p;
  p << "I am currently analyzing a claim based on a segment from the literature from several "
       "different aspects.\n"
    << "The segment is: " << segment << "\n"
    << "The claim is: " << claim << "\n"
    << "The aspects are: " << joined(aspects, ", ") << "\n"
    << "Please help me determine whether this segment is related to the claim so that I can "
       "analyze this claim based on it from at least one of these aspects. Your output should be "
       "'Yes' or 'No' in JSON format.\n";
  return make(TaskName::RelevanceJudge, p.str(),
              Schema::object({{"answer", Schema::one_of({"Yes", "No"})}}));
}

PromptInstance stance_detect(const std::string& segment, const std::string& claim,
                             const std::string& aspect, const std::string& description,
                             const std::vector<std::string>& path) {
  std::ostringstream p;
  p << "You are a stance detector, which determines the stance that a segment from a scientific "
       "paper has towards an aspect of a specific claim. Oftentimes, scientific papers do not "
       "provide explicit, outright stances, so your job is to figure out what stance the data or "
       "statement that they are presenting implies.\n"
    << "Segment: " << segment << "\n"
    << "What is the segment's stance specifically with respect to " << aspect << " for if "
    << claim << "? " << aspect << " can be described as " << description << ".\n"
    << "Claim: " << claim << "\n"
    << "Aspect to consider: " << aspect << ": " << description << "\n"
    << "Path to aspect: " << render_path(path) << "\n"
    << "Your stance options are the following:\n"
    << "- " << kSupports
    << ": The segment either implicitly or explicitly indicates that claim is true specific to the "
       "given aspect.\n"
    << "- " << kNeutral
    << ": The segment is relevant to the claim and aspect, but does not indicate whether the claim "
       "is true specific to the given aspect.\n"
    << "- " << kOpposes
    << ": The segment either implicitly or explicitly indicates that the claim is false specific "
       "to the given aspect.\n"
    << "- " << kIrrelevant
    << ": The segment does not contain relevant information on the claim and the aspect.\n";
  return make(TaskName::StanceDetect, p.str(),
              Schema::object({{"stance", Schema::one_of({kSupports, kNeutral, kOpposes, kIrrelevant})}}));
}

PromptInstance perspective_summarize(const std::string& claim, const std::string& aspect,
                                     const std::string& description,
                                     const std::vector<std::string>& path,
                                     const std::string& stance,
                                     const std::vector<std::string>& segments) {
  std::ostringstream p;
  p << "The following segments all take the stance '" << stance << "' towards the claim '" << claim
    << "' with respect to the aspect " << aspect << " (" << description << ").\n"
    << "Path to aspect: " << render_path(path) << "\n"
    << "Segments:\n"
    << numbered(segments)
    << "Summarize the shared perspective of these segments: the stance and the rationale behind it, "
       "in two to four sentences.\n";
  return make(TaskName::PerspectiveSummarize, p.str(),
              Schema::object({{"summary", Schema::string(true)}}));
}

PromptInstance node_relevance(const std::string& claim, const std::vector<std::string>& path) {
  std::ostringstream p;
  p << "[node_relevance]\nGiven the claim: " << claim
    << ", decide whether this path from the aspect tree is relevant to the analysis of the claim: "
    << render_path(path) << "\n"
    << "Answer 1 if relevant and 0 if irrelevant, and explain your judgment in a rationale.\n";
  return make(TaskName::EvalJudge, p.str(), binary_score());
}

PromptInstance path_granularity(const std::string& claim, const std::vector<std::string>& path) {
  std::ostringstream p;
  p << "[path_granularity]\nGiven the claim: " << claim
    << ", decide whether this path from the aspect tree has good granularity: " << render_path(path)
    << "\nCheck whether each child node is a more specific subaspect of its parent node. Answer 1 if "
       "granular and 0 if not, with a rationale.\n";
  return make(TaskName::EvalJudge, p.str(), binary_score());
}

PromptInstance sibling_granularity(const std::string& claim, const std::string& parent,
                                   const std::vector<std::string>& siblings) {
  std::ostringstream p;
  p << "[sibling_granularity]\nGiven the claim: " << claim
    << ", decide whether these siblings from parent node " << parent
    << " have the same level of specificity relative to their parent: " << joined(siblings, "; ")
    << "\nScore from 1 to 4: 1 = all differ in specificity, 2 = some share it, 3 = most share it, "
       "4 = all share the same level. Include a rationale.\n";
  return make(TaskName::EvalJudge, p.str(), Schema::object({{"score", Schema::integer(1, 4)}}));
}

PromptInstance uniqueness(const std::string& claim, const std::string& taxonomy,
                          const std::vector<std::string>& path) {
  std::ostringstream p;
  p << "[uniqueness]\nGiven the claim: " << claim << ", and this aspect taxonomy:\n"
    << taxonomy << "Does the node " << render_path(path)
    << " largely overlap with or duplicate any other node of the taxonomy? Answer 1 if it is "
       "unique and 0 if it overlaps, with a rationale.\n";
  return make(TaskName::EvalJudge, p.str(), binary_score());
}

PromptInstance segment_quality(const std::string& claim, const std::vector<std::string>& path,
                               const std::string& segment) {
  std::ostringstream p;
  p << "[segment_quality]\nGiven the claim: " << claim << ", decide whether this segment is "
    << "relevant to both the claim and the aspect " << render_path(path) << ".\n"
    << "Segment: " << segment << "\n"
    << "Answer 1 if relevant and 0 if not, with a rationale.\n";
  return make(TaskName::EvalJudge, p.str(), binary_score());
}

PromptInstance pairwise(const std::string& claim, const std::string& first_taxonomy,
                        const std::string& second_taxonomy) {
  std::ostringstream p;
  p << "Two aspect hierarchies were built to deconstruct the claim: " << claim << "\n"
    << "Hierarchy 1:\n" << first_taxonomy << "\nHierarchy 2:\n" << second_taxonomy
    << "\nWhich hierarchy better captures the aspects one would consider when evaluating the "
       "claim (relevance, granularity, coverage, no redundancy)? Answer \"1\", \"2\", or \"tie\".\n";
  return make(TaskName::PairwiseJudge, p.str(),
              Schema::object({{"winner", Schema::one_of({"1", "2", "tie"})}}));
}

}  // namespace claimtree::prompts
