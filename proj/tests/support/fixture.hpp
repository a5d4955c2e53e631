#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "claimtree/config.hpp"
#include "claimtree/pipeline.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline fs::path data_dir() { return CLAIMTREE_TEST_DATA; }
inline fs::path golden(const std::string& name) { return data_dir() / "golden" / name; }
inline fs::path cli() { return CLAIMTREE_CLI_PATH; }

inline claimtree::PipelineConfig config(const fs::path& out, const fs::path& mock_dir = data_dir() / "mock") {
  auto c = claimtree::PipelineConfig::from_file(data_dir() / "fixture_config.json");
  c.corpus_path = data_dir() / "fixture_corpus.jsonl";
  c.mock_dir = mock_dir;
  c.output_dir = out;
  return c;
}

struct Run {
  claimtree::BuildResult build;
  claimtree::PerspectiveRun perspectives;
};

// ingest, build, perspectives
inline Run run_pipeline(const claimtree::PipelineConfig& c) {
  namespace p = claimtree::pipeline;
  auto embedder = p::make_embedder(c);
  auto provider = p::make_provider(c);
  auto gateway = p::make_gateway(c, *provider);
  p::run_ingest(c, *embedder);
  Run r{p::run_build(c, *embedder, *gateway), {}};
  r.perspectives = p::run_perspectives(c, *embedder, *gateway);
  return r;
}

// Exit status of the CLI with the fixture flags prepended to `args`.
inline int cli_status(const std::string& command, const fs::path& out, const std::string& args = "",
                      const fs::path& mock_dir = data_dir() / "mock") {
  std::string line = "\"" + cli().string() + "\" " + command + " --config \"" +
                     (data_dir() / "fixture_config.json").string() + "\" --corpus \"" +
                     (data_dir() / "fixture_corpus.jsonl").string() + "\" --mock-dir \"" + mock_dir.string() +
                     "\" --out \"" + out.string() + "\" " + args + " >/dev/null 2>" +
                     "\"" + (out.parent_path() / "stderr.txt").string() + "\"";
  int status = std::system(line.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace fixture
