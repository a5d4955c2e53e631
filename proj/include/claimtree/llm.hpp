#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "claimtree/schema.hpp"

namespace claimtree {

enum class TaskName {
  CoarseAspects,
  KeywordExtract,
  KeywordFilter,
  SubaspectDiscovery,
  RelevanceJudge,
  StanceDetect,
  PerspectiveSummarize,
  EvalJudge,
  PairwiseJudge,
};

inline constexpr std::array<TaskName, 9> kAllTasks = {
    TaskName::CoarseAspects,      TaskName::KeywordExtract, TaskName::KeywordFilter,
    TaskName::SubaspectDiscovery, TaskName::RelevanceJudge, TaskName::StanceDetect,
    TaskName::PerspectiveSummarize, TaskName::EvalJudge,    TaskName::PairwiseJudge,
};

std::string_view to_string(TaskName task);
// Throws Error(UnknownTask).
TaskName parse_task(std::string_view name);

struct LlmTask {
  TaskName name = TaskName::CoarseAspects;
  double temperature = 0.3;
  double top_p = 0.99;
  std::size_t max_retries = 3;
};

// Default sampling parameters: 0.3 for structured tasks, 0.7 for subaspect
// discovery, nucleus 0.99 everywhere.
LlmTask default_task(TaskName name);

struct SamplingParams {
  double temperature;
  double top_p;
};

// Throws Error(UnknownTask) for unregistered names.
SamplingParams task_params(std::string_view task_name);

// Extra contract beyond the shape check; returns an error message or nullopt.
using ReplyCheck = std::function<std::optional<std::string>(const nlohmann::json&)>;

struct PromptInstance {
  TaskName task = TaskName::CoarseAspects;
  std::string rendered_text;
  Schema expected_schema = Schema::any();
  ReplyCheck check;
};

struct ChatRequest {
  TaskName task = TaskName::CoarseAspects;
  std::string prompt;        // text actually sent (includes retry feedback)
  std::string prompt_hash;   // short hash of the original rendered prompt
  std::size_t attempt = 0;   // 0 = first try
  double temperature = 0.3;
  double top_p = 0.99;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string describe() const = 0;
  // Returns the raw assistant message. Throws Error(ProviderUnavailable | Timeout | MissingFixture).
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Scripted provider for deterministic runs. Replies are matched by, in order:
// exact original-prompt hash, first rule whose substring occurs in the prompt,
// task default. An entry holding several responses hands them out in sequence
// and then repeats the last one.
class MockProvider final : public ChatProvider {
 public:
  MockProvider() = default;

  // Loads <task_name>.json files:
  //   {"exact": {"<hash>": ENTRY}, "rules": [{"contains": "...", ...ENTRY}], "default": ENTRY}
  // with ENTRY = {"response": R} | {"responses": [R, ...]}. A string R is sent
  // verbatim; any other JSON value is serialized.
  static std::unique_ptr<MockProvider> from_directory(const std::filesystem::path& dir);

  void add_exact(TaskName task, const std::string& prompt_hash, std::vector<std::string> responses);
  void add_rule(TaskName task, const std::string& contains, std::vector<std::string> responses);
  void set_default(TaskName task, std::vector<std::string> responses);

  std::string describe() const override { return "mock"; }
  std::string complete(const ChatRequest& request) override;

 private:
  struct Entry {
    std::string contains;
    std::vector<std::string> responses;
    std::unique_ptr<std::atomic<std::size_t>> cursor = std::make_unique<std::atomic<std::size_t>>(0);

    std::string next();
  };
  struct TaskScript {
    std::map<std::string, Entry> exact;
    std::vector<Entry> rules;
    std::optional<Entry> fallback;
  };

  std::map<TaskName, TaskScript> scripts_;
};

// Calls a user function; handy for judges whose answer depends on the prompt.
class FunctionProvider final : public ChatProvider {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FunctionProvider(Fn fn) : fn_(std::move(fn)) {}
  std::string describe() const override { return "function"; }
  std::string complete(const ChatRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

struct HttpChatOptions {
  std::string endpoint;   // POST {model, messages, temperature, top_p} -> {content}
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{120000};
  std::size_t max_attempts = 3;
  double requests_per_second = 0.0;  // 0 = unlimited
};

class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpChatOptions options);
  std::string describe() const override;
  std::string complete(const ChatRequest& request) override;

 private:
  HttpChatOptions options_;
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
};

// Forwards to another provider and keeps every first-attempt reply so a live
// run can be saved as a mock transcript directory.
class RecordingProvider final : public ChatProvider {
 public:
  explicit RecordingProvider(ChatProvider& inner) : inner_(inner) {}
  std::string describe() const override { return inner_.describe(); }
  std::string complete(const ChatRequest& request) override;
  void write(const std::filesystem::path& dir) const;

 private:
  ChatProvider& inner_;
  mutable std::mutex mu_;
  std::map<TaskName, std::map<std::string, std::vector<std::string>>> replies_;
};

struct CallRecord {
  TaskName task;
  std::string prompt_hash;
  std::size_t retries = 0;   // attempt index of this request
  bool ok = false;
  std::string error;
};

struct Completion {
  nlohmann::json value;
  std::size_t retries = 0;
};

// Pulls the first JSON document out of a reply, tolerating code fences and
// surrounding prose. nullopt when nothing parses.
std::optional<nlohmann::json> extract_json(std::string_view reply);

// Single choke point for LLM calls: sampling parameters per task, bounded
// in-flight requests, schema validation with error-feedback retries.
class Gateway {
 public:
  explicit Gateway(ChatProvider& provider, std::size_t max_in_flight = 4);

  void set_task(const LlmTask& task);
  const LlmTask& task(TaskName name) const;

  // Throws Error(SchemaViolation) after max_retries failed re-asks; provider
  // errors propagate unchanged.
  Completion complete(const PromptInstance& prompt);
  nlohmann::json complete_json(const PromptInstance& prompt) { return complete(prompt).value; }

  std::vector<CallRecord> call_log() const;
  void clear_log();

 private:
  ChatProvider& provider_;
  std::map<TaskName, LlmTask> tasks_;
  std::counting_semaphore<> in_flight_;
  mutable std::mutex log_mu_;
  std::vector<CallRecord> log_;
};

}  // namespace claimtree
