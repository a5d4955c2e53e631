#include "claimtree/llm.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "claimtree/error.hpp"
#include "claimtree/hash.hpp"
#include "claimtree/http.hpp"

namespace claimtree {

using nlohmann::json;

std::string_view to_string(TaskName task) {
  switch (task) {
    case TaskName::CoarseAspects: return "coarse_aspects";
    case TaskName::KeywordExtract: return "keyword_extract";
    case TaskName::KeywordFilter: return "keyword_filter";
    case TaskName::SubaspectDiscovery: return "subaspect_discovery";
    case TaskName::RelevanceJudge: return "relevance_judge";
    case TaskName::StanceDetect: return "stance_detect";
    case TaskName::PerspectiveSummarize: return "perspective_summarize";
    case TaskName::EvalJudge: return "eval_judge";
    case TaskName::PairwiseJudge: return "pairwise_judge";
  }
  return "unknown";
}

TaskName parse_task(std::string_view name) {
  for (TaskName t : kAllTasks) {
    if (to_string(t) == name) return t;
  }
  throw Error(ErrorCode::UnknownTask, "no LLM task named '" + std::string(name) + "'");
}

LlmTask default_task(TaskName name) {
  LlmTask t;
  t.name = name;
  t.temperature = name == TaskName::SubaspectDiscovery ? 0.7 : 0.3;
  t.top_p = 0.99;
  t.max_retries = 3;
  return t;
}

SamplingParams task_params(std::string_view task_name) {
  LlmTask t = default_task(parse_task(task_name));
  return {t.temperature, t.top_p};
}

// --- MockProvider -----------------------------------------------------------

std::string MockProvider::Entry::next() {
  if (responses.empty()) throw Error(ErrorCode::MissingFixture, "fixture entry has no responses");
  std::size_t i = cursor->fetch_add(1);
  return responses[std::min(i, responses.size() - 1)];
}

namespace {

std::string reply_text(const json& r) { return r.is_string() ? r.get<std::string>() : r.dump(); }

std::vector<std::string> entry_responses(const json& entry, const std::string& where) {
  if (entry.is_object() && entry.contains("responses")) {
    std::vector<std::string> out;
    for (const auto& r : entry.at("responses")) out.push_back(reply_text(r));
    return out;
  }
  if (entry.is_object() && entry.contains("response")) return {reply_text(entry.at("response"))};
  throw Error(ErrorCode::UnreadableFile, where + ": entry needs 'response' or 'responses'");
}

}  // namespace

std::unique_ptr<MockProvider> MockProvider::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::UnreadableFile, "mock transcript directory " + dir.string() + " not found");
  }
  auto mock = std::make_unique<MockProvider>();
  for (TaskName task : kAllTasks) {
    auto file = dir / (std::string(to_string(task)) + ".json");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::UnreadableFile, file.string() + ": " + e.what());
    }
    const std::string where = file.filename().string();
    if (doc.contains("exact")) {
      for (const auto& [hash, entry] : doc["exact"].items()) {
        mock->add_exact(task, hash, entry_responses(entry, where));
      }
    }
    if (doc.contains("rules")) {
      for (const auto& rule : doc["rules"]) {
        mock->add_rule(task, rule.at("contains").get<std::string>(), entry_responses(rule, where));
      }
    }
    if (doc.contains("default")) mock->set_default(task, entry_responses(doc["default"], where));
  }
  return mock;
}

void MockProvider::add_exact(TaskName task, const std::string& prompt_hash,
                             std::vector<std::string> responses) {
  Entry e;
  e.responses = std::move(responses);
  scripts_[task].exact.insert_or_assign(prompt_hash, std::move(e));
}

void MockProvider::add_rule(TaskName task, const std::string& contains,
                            std::vector<std::string> responses) {
  Entry e;
  e.contains = contains;
  e.responses = std::move(responses);
  scripts_[task].rules.push_back(std::move(e));
}

void MockProvider::set_default(TaskName task, std::vector<std::string> responses) {
  Entry e;
  e.responses = std::move(responses);
  scripts_[task].fallback = std::move(e);
}

std::string MockProvider::complete(const ChatRequest& request) {
  auto it = scripts_.find(request.task);
  if (it != scripts_.end()) {
    auto& script = it->second;
    if (auto ex = script.exact.find(request.prompt_hash); ex != script.exact.end()) {
      return ex->second.next();
    }
    for (auto& rule : script.rules) {
      if (request.prompt.find(rule.contains) != std::string::npos) return rule.next();
    }
    if (script.fallback) return script.fallback->next();
  }
  throw Error(ErrorCode::MissingFixture, "no scripted reply for task " +
                                             std::string(to_string(request.task)) + " prompt " +
                                             request.prompt_hash);
}

// --- HttpChatProvider -------------------------------------------------------

HttpChatProvider::HttpChatProvider(HttpChatOptions options) : options_(std::move(options)) {
  http::parse_url(options_.endpoint);
}

std::string HttpChatProvider::describe() const {
  return "http(endpoint=" + options_.endpoint + ",model=" + options_.model + ")";
}

std::string HttpChatProvider::complete(const ChatRequest& request) {
  if (options_.requests_per_second > 0.0) {
    const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / options_.requests_per_second));
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(pace_mu_);
      slot = std::max(next_slot_, std::chrono::steady_clock::now());
      next_slot_ = slot + interval;
    }
    std::this_thread::sleep_until(slot);
  }

  json body;
  body["model"] = options_.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["top_p"] = request.top_p;

  http::PostOptions post;
  post.timeout = options_.timeout;
  post.max_attempts = options_.max_attempts;
  if (!options_.api_key.empty()) post.headers.emplace_back("Authorization", "Bearer " + options_.api_key);
  json reply = http::post_json(options_.endpoint, body, post);

  if (reply.contains("content") && reply["content"].is_string()) return reply["content"].get<std::string>();
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ProviderUnavailable, "chat reply has no 'content'");
  }
}

// --- RecordingProvider ------------------------------------------------------

std::string RecordingProvider::complete(const ChatRequest& request) {
  std::string reply = inner_.complete(request);
  std::lock_guard lock(mu_);
  replies_[request.task][request.prompt_hash].push_back(reply);
  return reply;
}

void RecordingProvider::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::lock_guard lock(mu_);
  for (const auto& [task, by_hash] : replies_) {
    nlohmann::ordered_json doc;
    doc["exact"] = nlohmann::ordered_json::object();
    for (const auto& [hash, replies] : by_hash) doc["exact"][hash]["responses"] = replies;
    std::ofstream out(dir / (std::string(to_string(task)) + ".json"), std::ios::binary);
    out << doc.dump(2) << '\n';
  }
}

// --- Gateway ----------------------------------------------------------------

std::optional<json> extract_json(std::string_view reply) {
  auto try_parse = [](std::string_view s) -> std::optional<json> {
    try {
      return json::parse(s);
    } catch (const json::parse_error&) {
      return std::nullopt;
    }
  };
  if (auto j = try_parse(reply)) return j;

  // ```json ... ``` fences
  if (auto fence = reply.find("```"); fence != std::string_view::npos) {
    auto body_start = reply.find('\n', fence);
    auto close = body_start == std::string_view::npos ? std::string_view::npos
                                                      : reply.find("```", body_start);
    if (close != std::string_view::npos) {
      if (auto j = try_parse(reply.substr(body_start + 1, close - body_start - 1))) return j;
    }
  }

  // Outermost {...} or [...] span.
  for (auto [open, close] : {std::pair{'{', '}'}, std::pair{'[', ']'}}) {
    auto first = reply.find(open);
    auto last = reply.rfind(close);
    if (first != std::string_view::npos && last != std::string_view::npos && last > first) {
      if (auto j = try_parse(reply.substr(first, last - first + 1))) return j;
    }
  }
  return std::nullopt;
}

Gateway::Gateway(ChatProvider& provider, std::size_t max_in_flight)
    : provider_(provider),
      in_flight_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, max_in_flight))) {
  for (TaskName t : kAllTasks) tasks_.emplace(t, default_task(t));
}

void Gateway::set_task(const LlmTask& task) { tasks_[task.name] = task; }

const LlmTask& Gateway::task(TaskName name) const { return tasks_.at(name); }

Completion Gateway::complete(const PromptInstance& prompt) {
  if (prompt.rendered_text.empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty prompt for task " + std::string(to_string(prompt.task)));
  }
  const LlmTask& settings = tasks_.at(prompt.task);
  const std::string hash = short_hash(prompt.rendered_text);

  std::string last_error;
  for (std::size_t attempt = 0; attempt <= settings.max_retries; ++attempt) {
    ChatRequest req;
    req.task = prompt.task;
    req.prompt_hash = hash;
    req.attempt = attempt;
    req.temperature = settings.temperature;
    req.top_p = settings.top_p;
    req.prompt = prompt.rendered_text;
    if (attempt > 0) {
      req.prompt += "\n\nYour previous output was rejected: " + last_error +
                    "\nRespond again with only JSON of this shape: " +
                    prompt.expected_schema.describe().dump();
    }

    std::string reply;
    in_flight_.acquire();
    try {
      reply = provider_.complete(req);
    } catch (const Error& e) {
      in_flight_.release();
      std::lock_guard lock(log_mu_);
      log_.push_back({prompt.task, hash, attempt, false, e.what()});
      throw;
    }
    in_flight_.release();

    auto parsed = extract_json(reply);
    std::optional<std::string> problem;
    if (!parsed) {
      problem = "output is not valid JSON";
    } else if (auto err = prompt.expected_schema.validate(*parsed)) {
      problem = *err;
    } else if (prompt.check) {
      problem = prompt.check(*parsed);
    }

    {
      std::lock_guard lock(log_mu_);
      log_.push_back({prompt.task, hash, attempt, !problem, problem.value_or("")});
    }
    if (!problem) return {std::move(*parsed), attempt};
    last_error = *problem;
  }
  throw Error(ErrorCode::SchemaViolation, std::string(to_string(prompt.task)) + " prompt " + hash +
                                              " still invalid after " +
                                              std::to_string(settings.max_retries) +
                                              " retries: " + last_error);
}

std::vector<CallRecord> Gateway::call_log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

void Gateway::clear_log() {
  std::lock_guard lock(log_mu_);
  log_.clear();
}

}  // namespace claimtree
