#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "claimtree/config.hpp"
#include "claimtree/error.hpp"
#include "claimtree/pipeline.hpp"
#include "claimtree/report.hpp"

namespace fs = std::filesystem;
using namespace claimtree;

namespace {

struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::string> claim;
  std::optional<std::string> corpus;
  std::optional<std::string> out;
  std::optional<std::string> segmenter;
  std::optional<std::size_t> segment_window;
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> k_aspects;
  std::optional<std::size_t> k_subaspects;
  std::optional<std::size_t> k_keywords;
  std::optional<std::size_t> n_enrich;
  std::optional<std::size_t> pool_size;
  std::optional<std::size_t> k_segments;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<std::size_t> window;
  std::optional<std::size_t> min_chars;
  std::optional<double> relative_threshold;
  std::optional<std::string> llm_provider;
  std::optional<std::string> mock_dir;
  std::optional<std::string> llm_endpoint;
  std::optional<std::string> llm_model;
  std::optional<double> llm_rps;
  std::optional<std::string> embedder;
  std::optional<std::size_t> embed_dim;
  std::optional<std::string> embed_endpoint;
  std::optional<std::string> embed_model;
  std::optional<std::size_t> concurrency;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> temperatures;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_file, "JSON config file (flags override it)");
  cmd->add_option("--claim", o.claim, "claim to deconstruct");
  cmd->add_option("--corpus", o.corpus, "corpus JSONL (doc_id, title, text)");
  cmd->add_option("--out", o.out, "output directory for all artifacts");
  cmd->add_option("--segmenter", o.segmenter, "c99 | window");
  cmd->add_option("--segment-window", o.segment_window, "sentences per window segment");
  cmd->add_option("--max-depth", o.max_depth, "maximum hierarchy depth");
  cmd->add_option("--k-aspects", o.k_aspects, "maximum coarse aspects");
  cmd->add_option("--k-subaspects", o.k_subaspects, "maximum subaspects per node");
  cmd->add_option("--k-keywords", o.k_keywords, "keywords per node after enrichment");
  cmd->add_option("--n-enrich", o.n_enrich, "segments shown to keyword extraction");
  cmd->add_option("--pool-size", o.pool_size, "ranking candidate pool");
  cmd->add_option("--k-segments", o.k_segments, "discriminative segments per node");
  cmd->add_option("--beta", o.beta, "target score scale");
  cmd->add_option("--gamma", o.gamma, "distractor score scale");
  cmd->add_option("--epsilon", o.epsilon, "distractor floor");
  cmd->add_option("--delta", o.delta, "relevant fraction below which filtering stops");
  cmd->add_option("--window", o.window, "half-width of the relevance window");
  cmd->add_option("--min-chars", o.min_chars, "segments shorter than this skip filtering");
  cmd->add_option("--relative-threshold", o.relative_threshold, "classifier exploration band");
  cmd->add_option("--llm-provider", o.llm_provider, "mock | http");
  cmd->add_option("--mock-dir", o.mock_dir, "mock transcript directory");
  cmd->add_option("--llm-endpoint", o.llm_endpoint, "chat endpoint URL");
  cmd->add_option("--llm-model", o.llm_model, "chat model name");
  cmd->add_option("--llm-rps", o.llm_rps, "chat requests per second (0 = unlimited)");
  cmd->add_option("--embedder", o.embedder, "hashed | http");
  cmd->add_option("--embed-dim", o.embed_dim, "hashed embedder dimension");
  cmd->add_option("--embed-endpoint", o.embed_endpoint, "embedding endpoint URL");
  cmd->add_option("--embed-model", o.embed_model, "embedding model name");
  cmd->add_option("--concurrency", o.concurrency, "in-flight request cap");
  cmd->add_option("--seed", o.seed, "embedder seed");
  cmd->add_option("--temperature", o.temperatures, "task=value, repeatable");
}

template <typename T, typename U>
void apply(const std::optional<T>& v, U& target) {
  if (v) target = *v;
}

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig c = o.config_file ? PipelineConfig::from_file(*o.config_file) : PipelineConfig{};
  apply(o.claim, c.claim);
  apply(o.corpus, c.corpus_path);
  apply(o.out, c.output_dir);
  apply(o.segmenter, c.segmenter);
  apply(o.segment_window, c.segment_window);
  apply(o.max_depth, c.hierarchy.max_depth);
  apply(o.k_aspects, c.hierarchy.k_aspects);
  apply(o.k_subaspects, c.hierarchy.k_subaspects);
  apply(o.k_keywords, c.hierarchy.k_keywords);
  apply(o.n_enrich, c.hierarchy.n_enrich);
  apply(o.pool_size, c.hierarchy.ranking.pool_size);
  apply(o.k_segments, c.hierarchy.ranking.k_segments);
  apply(o.beta, c.hierarchy.ranking.beta);
  apply(o.gamma, c.hierarchy.ranking.gamma);
  apply(o.epsilon, c.hierarchy.ranking.epsilon);
  apply(o.delta, c.filter.delta);
  apply(o.window, c.filter.window);
  apply(o.min_chars, c.filter.min_chars);
  apply(o.relative_threshold, c.relative_threshold);
  apply(o.llm_provider, c.llm_provider);
  apply(o.mock_dir, c.mock_dir);
  apply(o.llm_endpoint, c.llm_endpoint);
  apply(o.llm_model, c.llm_model);
  apply(o.llm_rps, c.llm_requests_per_second);
  apply(o.embedder, c.embedder);
  apply(o.embed_dim, c.embed_dim);
  apply(o.embed_endpoint, c.embed_endpoint);
  apply(o.embed_model, c.embed_model);
  apply(o.concurrency, c.concurrency);
  apply(o.seed, c.seed);
  for (const auto& spec : o.temperatures) {
    auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--temperature expects task=value");
    try {
      c.tasks[parse_task(spec.substr(0, eq))].temperature = std::stod(spec.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "bad temperature in '" + spec + "'");
    }
  }
  c.validate();
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Corpus-grounded claim aspect hierarchies"};
  app.require_subcommand(1);
  Overrides o;

  auto* ingest = app.add_subcommand("ingest", "segment and embed the corpus");
  add_config_flags(ingest, o);
  auto* build = app.add_subcommand("build", "build the aspect hierarchy");
  add_config_flags(build, o);
  auto* persp = app.add_subcommand("perspectives", "filter, classify and judge stances");
  add_config_flags(persp, o);

  auto* evaluate = app.add_subcommand("evaluate", "score a hierarchy or compare two");
  add_config_flags(evaluate, o);
  std::vector<std::string> eval_files;
  std::vector<std::string> pairwise;
  evaluate->add_option("hierarchy", eval_files, "hierarchy file (default <out>/hierarchy.json)")->expected(0, 1);
  evaluate->add_option("--pairwise", pairwise, "compare two hierarchy files")->expected(2);

  auto* report = app.add_subcommand("report", "render a hierarchy");
  std::string report_file;
  std::string format = "md";
  std::string report_out;
  report->add_option("hierarchy", report_file, "hierarchy or perspectives JSON")->required();
  report->add_option("--format", format, "md | dot");
  report->add_option("--output", report_out, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (report->parsed()) {
      auto text = render_report(AspectHierarchy::load(report_file), format);
      if (report_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(report_out, std::ios::binary) << text;
      }
      return 0;
    }

    PipelineConfig config = resolve(o);
    if (ingest->parsed()) {
      auto embedder = pipeline::make_embedder(config);
      auto s = pipeline::run_ingest(config, *embedder);
      std::cout << "ingested " << s.documents << " documents into " << s.segments << " segments\n"
                << "fingerprint " << s.fingerprint << '\n';
      return 0;
    }
    if (evaluate->parsed()) {
      std::vector<fs::path> inputs;
      if (!pairwise.empty()) {
        inputs = {pairwise[0], pairwise[1]};
      } else {
        inputs.push_back(eval_files.empty() ? config.output_dir / pipeline::files::kHierarchy
                                            : fs::path(eval_files[0]));
      }
      for (const auto& p : inputs) AspectHierarchy::load(p);
      auto provider = pipeline::make_provider(config);
      auto gateway = pipeline::make_gateway(config, *provider);
      if (!pairwise.empty()) {
        auto r = pipeline::run_pairwise(config, *gateway, inputs[0], inputs[1]);
        std::cout << to_string(r.verdict) << '\n';
      } else {
        std::cout << pipeline::run_evaluate(config, *gateway, inputs[0]).table();
      }
      return 0;
    }

    auto embedder = pipeline::make_embedder(config);
    auto provider = pipeline::make_provider(config);
    auto gateway = pipeline::make_gateway(config, *provider);
    if (build->parsed()) {
      auto r = pipeline::run_build(config, *embedder, *gateway);
      std::cout << "hierarchy with " << r.tree.size() << " nodes, depth " << r.tree.max_node_depth()
                << '\n';
      return 0;
    }
    auto r = pipeline::run_perspectives(config, *embedder, *gateway);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "retained " << r.retained.size() << " of " << r.eligible << " segments ("
              << r.boundary.judged << " relevance judgments)\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "claimtree: " << e.what() << '\n';
    return pipeline::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "claimtree: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
