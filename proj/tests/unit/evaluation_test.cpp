#include <atomic>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "claimtree/error.hpp"
#include "claimtree/evaluation.hpp"

using namespace claimtree;
using nlohmann::json;

namespace {

// root with children a..j (ten nodes below the root)
AspectHierarchy flat_tree(std::size_t n, const std::string& claim = "Claim") {
  AspectHierarchy t(claim);
  for (std::size_t i = 0; i < n; ++i) t.add_child("0", {"aspect" + std::string(1, char('a' + i)), "", {}});
  return t;
}

FunctionProvider constant_score(int score, std::atomic<int>* calls = nullptr) {
  return FunctionProvider([score, calls](const ChatRequest&) {
    if (calls) ++*calls;
    return json{{"score", score}}.dump();
  });
}

}  // namespace

TEST(Metrics, ConstantJudges) {
  auto t = flat_tree(4);
  for (int s : {0, 1}) {
    auto p = constant_score(s);
    Gateway g(p);
    EXPECT_DOUBLE_EQ(*eval_node_relevance(g, t).aggregate, s);
    EXPECT_DOUBLE_EQ(*eval_path_granularity(g, t, 4).aggregate, s);
    EXPECT_DOUBLE_EQ(*eval_uniqueness(g, t).aggregate, s);
  }
}

TEST(Metrics, NodeRelevanceFraction) {
  auto t = flat_tree(10);
  FunctionProvider p([](const ChatRequest& r) {
    return json{{"score", r.prompt.find("Claim -> aspectc\n") != std::string::npos ? 0 : 1}}.dump();
  });
  Gateway g(p);
  auto r = eval_node_relevance(g, t, 3);
  EXPECT_EQ(r.items.size(), 10u);
  EXPECT_NEAR(*r.aggregate, 0.9, 1e-15);
  EXPECT_EQ(r.items[2], (std::pair<std::string, double>{"0.3", 0.0}));
}

TEST(Metrics, RootOnlyTree) {
  AspectHierarchy t("Claim");
  std::atomic<int> calls{0};
  auto p = constant_score(1, &calls);
  Gateway g(p);
  auto rel = eval_node_relevance(g, t);
  ASSERT_EQ(rel.items.size(), 1u);
  EXPECT_EQ(rel.items[0].first, "0");
  calls = 0;
  auto u = eval_uniqueness(g, t);
  EXPECT_EQ(calls.load(), 0);
  EXPECT_DOUBLE_EQ(*u.aggregate, 1.0);
  EXPECT_FALSE(eval_sibling_granularity(g, t).aggregate.has_value());
}

TEST(Metrics, SiblingGranularityNormalization) {
  AspectHierarchy t("Claim");
  auto a = t.add_child("0", {"x", "", {}});
  t.add_child("0", {"y", "", {}});
  t.add_child(a, {"x1", "", {}});
  t.add_child(a, {"x2", "", {}});
  t.add_child("0.2", {"lonely", "", {}});
  FunctionProvider p([](const ChatRequest& r) {
    return json{{"score", r.prompt.find("parent node Claim ") != std::string::npos ? 4 : 2}}.dump();
  });
  Gateway g(p);
  auto r = eval_sibling_granularity(g, t);
  ASSERT_EQ(r.items.size(), 2u);
  EXPECT_DOUBLE_EQ(r.items[0].second, 4.0);
  EXPECT_DOUBLE_EQ(r.items[1].second, 2.0);
  EXPECT_NEAR(*r.aggregate, (1.0 + 1.0 / 3.0) / 2.0, 1e-15);
}

TEST(Metrics, SegmentQuality) {
  auto t = flat_tree(2);
  SegmentMap segs;
  for (int i = 0; i < 4; ++i) {
    Segment s;
    s.segment_id = "d#" + std::to_string(i);
    s.doc_id = "d";
    s.text = i == 3 ? "off topic" : "on topic";
    segs.emplace(s.segment_id, s);
  }
  t.node("0.1").attached_segments = {"d#0", "d#1", "d#2", "d#3"};
  FunctionProvider p([](const ChatRequest& r) {
    return json{{"score", r.prompt.find("off topic") != std::string::npos ? 0 : 1}}.dump();
  });
  Gateway g(p);
  auto r = eval_segment_quality(g, t, segs);
  ASSERT_EQ(r.items.size(), 1u);
  EXPECT_DOUBLE_EQ(*r.aggregate, 0.75);

  auto bare = flat_tree(2);
  EXPECT_FALSE(eval_segment_quality(g, bare, segs).aggregate.has_value());
  t.node("0.2").attached_segments = {"ghost"};
  EXPECT_THROW(eval_segment_quality(g, t, segs), Error);
}

TEST(Metrics, MissingFixtureBecomesJudgeFailure) {
  MockProvider empty;
  Gateway g(empty);
  try {
    eval_node_relevance(g, flat_tree(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::JudgeFailure);
  }
}

TEST(Metrics, ReportSerialization) {
  auto t = flat_tree(3);
  auto p = constant_score(1);
  Gateway g(p);
  auto report = evaluate_hierarchy(g, t, {});
  auto j = report.to_json();
  EXPECT_DOUBLE_EQ(j["metrics"]["node_relevance"].get<double>(), 1.0);
  EXPECT_TRUE(j["metrics"]["segment_quality"].is_null());
  EXPECT_DOUBLE_EQ(j["per_node"]["uniqueness"]["0.2"].get<double>(), 1.0);
  auto table = report.table();
  EXPECT_NE(table.find("Rel"), std::string::npos);
  EXPECT_NE(table.find("100.00"), std::string::npos);
  EXPECT_NE(table.find("-"), std::string::npos);
}

TEST(Pairwise, FourVerdicts) {
  auto a = flat_tree(2);
  auto b = flat_tree(3);
  struct Case {
    const char* first;
    const char* second;
    Verdict want;
  };
  for (const auto& c : {Case{"1", "2", Verdict::AWins}, Case{"2", "1", Verdict::BWins},
                        Case{"tie", "tie", Verdict::ExplicitTie}, Case{"1", "1", Verdict::ImplicitTie},
                        Case{"1", "tie", Verdict::ImplicitTie}}) {
    MockProvider m;
    m.set_default(TaskName::PairwiseJudge,
                  {json{{"winner", c.first}}.dump(), json{{"winner", c.second}}.dump()});
    Gateway g(m);
    auto r = pairwise_compare(g, a, b);
    EXPECT_EQ(r.verdict, c.want) << c.first << "/" << c.second;
    EXPECT_EQ(r.a_first, c.first);
    EXPECT_EQ(r.b_first, c.second);
  }
  EXPECT_EQ(to_string(Verdict::ImplicitTie), "implicit_tie");
  MockProvider m;
  Gateway g(m);
  EXPECT_THROW(pairwise_compare(g, a, flat_tree(2, "Other claim")), Error);
}

TEST(Outline, Indentation) {
  AspectHierarchy t("C");
  auto a = t.add_child("0", {"a", "", {}});
  t.add_child(a, {"b", "", {}});
  EXPECT_EQ(render_outline(t), "- C\n  - a\n    - b\n");
}
