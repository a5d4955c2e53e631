#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "claimtree/config.hpp"
#include "claimtree/error.hpp"
#include "claimtree/pipeline.hpp"
#include "claimtree/report.hpp"
#include "fixture.hpp"
#include "scratch.hpp"

using namespace claimtree;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Copy of the fixture transcripts with one task file replaced.
fs::path mock_with(scratch::Dir& dir, const std::string& task_file, const json& content) {
  auto mock = dir.path() / "mock";
  fs::create_directories(mock);
  for (const auto& e : fs::directory_iterator(fixture::data_dir() / "mock")) {
    fs::copy_file(e.path(), mock / e.path().filename(), fs::copy_options::overwrite_existing);
  }
  std::ofstream(mock / task_file) << content.dump(2);
  return mock;
}

std::string stderr_of(scratch::Dir& dir) { return scratch::read(dir.path() / "stderr.txt"); }

}  // namespace

TEST(Config, MergeAndValidate) {
  PipelineConfig c;
  c.merge_json(json{{"claim", "x"}, {"max_depth", 2}, {"tasks", {{"coarse_aspects", {{"temperature", 0.1}}}}}});
  EXPECT_EQ(c.claim, "x");
  EXPECT_EQ(c.hierarchy.max_depth, 2u);
  EXPECT_DOUBLE_EQ(c.tasks.at(TaskName::CoarseAspects).temperature, 0.1);
  EXPECT_DOUBLE_EQ(c.tasks.at(TaskName::SubaspectDiscovery).temperature, 0.7);
  EXPECT_THROW(c.merge_json(json{{"max_dpeth", 2}}), Error);
  EXPECT_THROW(c.merge_json(json::array()), Error);
  PipelineConfig bad;
  bad.segmenter = "texttiling";
  EXPECT_THROW(bad.validate(), Error);
  PipelineConfig ok;
  EXPECT_NO_THROW(ok.validate());
}

TEST(Config, FingerprintsTrackParameters) {
  PipelineConfig a;
  a.claim = "c";
  auto fa = ingest_fingerprint("sha", a, "hashed");
  EXPECT_EQ(fa, ingest_fingerprint("sha", a, "hashed"));
  EXPECT_NE(fa, ingest_fingerprint("sha2", a, "hashed"));
  EXPECT_NE(fa, ingest_fingerprint("sha", a, "other"));
  PipelineConfig b = a;
  b.concurrency = 16;
  b.output_dir = "elsewhere";
  EXPECT_EQ(pipeline_fingerprint(fa, a), pipeline_fingerprint(fa, b));
  b.hierarchy.ranking.beta = 2.0;
  EXPECT_NE(pipeline_fingerprint(fa, a), pipeline_fingerprint(fa, b));
  PipelineConfig w = a;
  w.segmenter = "window";
  EXPECT_NE(fa, ingest_fingerprint("sha", w, "hashed"));
}

TEST(Pipeline, FixtureMatchesGoldenFiles) {
  scratch::Dir dir;
  auto c = fixture::config(dir.path() / "out");
  auto run = fixture::run_pipeline(c);
  EXPECT_EQ(scratch::read(c.output_dir / "hierarchy.json"), scratch::read(fixture::golden("hierarchy.json")));
  EXPECT_EQ(scratch::read(c.output_dir / "perspectives.json"),
            scratch::read(fixture::golden("perspectives.json")));
  EXPECT_EQ(scratch::read(c.output_dir / "consensus.csv"), scratch::read(fixture::golden("consensus.csv")));

  const auto& t = run.build.tree;
  ASSERT_EQ(t.root().children.size(), 3u);
  EXPECT_EQ(t.node("0.1").label, "efficacy");
  EXPECT_EQ(t.node("0.2").label, "safety");
  EXPECT_EQ(t.node("0.3").label, "distribution");
  ASSERT_GE(t.node("0.1").keywords.size(), 3u);
  EXPECT_EQ(t.node("0.1").keywords[0], "neutralization");
  EXPECT_EQ(t.node("0.1").keywords[1], "immune stimulation");
  EXPECT_EQ(t.node("0.1").keywords[2], "post-dose antibody response");
  ASSERT_EQ(t.node("0.2").children.size(), 3u);
  EXPECT_EQ(t.node("0.2.1").label, "safety for children");
  EXPECT_EQ(t.node("0.2.2").label, "safety for adults");
  EXPECT_EQ(t.node("0.2.3").label, "safety for elderly");

  auto provider = pipeline::make_provider(c);
  auto gateway = pipeline::make_gateway(c, *provider);
  pipeline::run_evaluate(c, *gateway, c.output_dir / "hierarchy.json");
  auto got = json::parse(scratch::read(c.output_dir / "metrics.json"));
  auto want = json::parse(scratch::read(fixture::golden("metrics_hierarchy.json")));
  EXPECT_EQ(got, want);
}

TEST(Pipeline, RerunsAreIdempotent) {
  scratch::Dir dir;
  auto c = fixture::config(dir.path() / "out");
  fixture::run_pipeline(c);
  auto first = scratch::read(c.output_dir / "perspectives.json");
  auto index = scratch::read(c.output_dir / "index" / "vectors.bin");
  fixture::run_pipeline(c);
  EXPECT_EQ(scratch::read(c.output_dir / "perspectives.json"), first);
  EXPECT_EQ(scratch::read(c.output_dir / "index" / "vectors.bin"), index);
}

TEST(Pipeline, BuildNeedsIngest) {
  scratch::Dir dir;
  auto c = fixture::config(dir.path() / "out");
  auto embedder = pipeline::make_embedder(c);
  auto provider = pipeline::make_provider(c);
  auto gateway = pipeline::make_gateway(c, *provider);
  try {
    pipeline::run_build(c, *embedder, *gateway);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnreadableFile);
    EXPECT_NE(std::string(e.what()).find("claimtree ingest"), std::string::npos);
  }
}

TEST(Pipeline, FingerprintMismatchAfterParameterChange) {
  scratch::Dir dir;
  auto c = fixture::config(dir.path() / "out");
  auto embedder = pipeline::make_embedder(c);
  pipeline::run_ingest(c, *embedder);
  auto changed = c;
  changed.segmenter = "window";
  try {
    pipeline::load_ingest(changed, *embedder);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FingerprintMismatch);
  }
  auto other_dim = c;
  other_dim.embed_dim = 128;
  auto e128 = pipeline::make_embedder(other_dim);
  EXPECT_THROW(pipeline::load_ingest(other_dim, *e128), Error);
}

TEST(Report, MarkdownAndDot) {
  AspectHierarchy t("C");
  auto a = t.add_child("0", {"a", "", {"k1", "k2"}});
  t.add_child(a, {"b", "", {}});
  auto md = render_report(t, "md");
  EXPECT_NE(md.find("- **C** `0`\n"), std::string::npos);
  EXPECT_NE(md.find("\n  - **a** `0.1`\n    keywords: k1, k2\n"), std::string::npos);
  EXPECT_NE(md.find("\n    - **b** `0.1.1`\n"), std::string::npos);
  auto dot = render_report(t, "dot");
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("\"0.1\" -> \"0.1.1\""), std::string::npos);
  try {
    render_report(t, "pdf");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownFormat);
  }
}

TEST(Cli, ExitCodes) {
  scratch::Dir dir;
  auto out = dir.path() / "out";
  EXPECT_EQ(fixture::cli_status("", out), 1);
  EXPECT_EQ(fixture::cli_status("ingest", out, "--k-aspects notanumber"), 1);
  EXPECT_EQ(fixture::cli_status("build", out), 1);  // no ingest yet
  EXPECT_EQ(fixture::cli_status("ingest", out), 0);
  EXPECT_EQ(fixture::cli_status("build", out, "--llm-provider http --llm-endpoint http://127.0.0.1:9/chat"), 2);

  auto mock = mock_with(dir, "coarse_aspects.json", json{{"default", {{"response", {{"aspects", json::array()}}}}}});
  EXPECT_EQ(fixture::cli_status("build", out, "", mock), 3);
  EXPECT_EQ(fixture::cli_status("build", out), 0);
}

TEST(Cli, EvaluateFailsFastOnBadPath) {
  scratch::Dir dir;
  auto out = dir.path() / "out";
  auto empty = mock_with(dir, "eval_judge.json", json{{"rules", json::array()}});
  EXPECT_EQ(fixture::cli_status("evaluate", out, "\"" + (dir.path() / "missing.json").string() + "\"", empty), 1);
  EXPECT_NE(stderr_of(dir).find("missing.json"), std::string::npos);
  EXPECT_EQ(fixture::cli_status("evaluate", out,
                                "--pairwise \"" + fixture::golden("hierarchy.json").string() + "\" \"" +
                                    (dir.path() / "missing.json").string() + "\""),
            1);
}

TEST(Cli, PairwiseAndReport) {
  scratch::Dir dir;
  auto out = dir.path() / "out";
  auto g = fixture::golden("hierarchy.json").string();
  EXPECT_EQ(fixture::cli_status("evaluate", out, "--pairwise \"" + g + "\" \"" + g + "\""), 0);
  auto verdict = json::parse(scratch::read(out / "pairwise.json"));
  EXPECT_EQ(verdict["verdict"], "implicit_tie");  // the fixture judge always prefers the first
  std::string report = "\"" + fixture::cli().string() + "\" report \"" + g + "\" --format dot --output \"" +
                       (dir.path() / "h.dot").string() + "\"";
  EXPECT_EQ(std::system(report.c_str()), 0);
  EXPECT_EQ(scratch::read(dir.path() / "h.dot").rfind("digraph", 0), 0u);
}

TEST(Cli, MissingStanceFixtureNamesThePair) {
  scratch::Dir dir;
  auto out = dir.path() / "out";
  auto mock = mock_with(dir, "stance_detect.json", json{{"rules", json::array()}});
  ASSERT_EQ(fixture::cli_status("ingest", out), 0);
  ASSERT_EQ(fixture::cli_status("build", out), 0);
  EXPECT_EQ(fixture::cli_status("perspectives", out, "", mock), 3);
  auto err = stderr_of(dir);
  EXPECT_NE(err.find("stance for (segment "), std::string::npos) << err;
  EXPECT_NE(err.find(", node 0"), std::string::npos) << err;
}

TEST(Cli, EmptyRetentionWarnsAndSucceeds) {
  scratch::Dir dir;
  auto out = dir.path() / "out";
  auto mock = mock_with(dir, "relevance_judge.json", json{{"default", {{"response", {{"answer", "No"}}}}}});
  ASSERT_EQ(fixture::cli_status("ingest", out), 0);
  ASSERT_EQ(fixture::cli_status("build", out), 0);
  EXPECT_EQ(fixture::cli_status("perspectives", out, "", mock), 0);
  EXPECT_NE(stderr_of(dir).find("warning:"), std::string::npos);
  auto t = AspectHierarchy::load(out / "perspectives.json");
  for (const auto& n : t.nodes()) {
    ASSERT_TRUE(n.perspectives.has_value());
    EXPECT_TRUE(n.attached_segments.empty());
  }
}
