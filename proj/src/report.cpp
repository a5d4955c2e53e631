#include "claimtree/report.hpp"

#include <sstream>

#include "claimtree/error.hpp"
#include "claimtree/perspective.hpp"

namespace claimtree {

namespace {

std::string counts_line(const StanceCounts& c) {
  return std::to_string(c.support) + "/" + std::to_string(c.neutral) + "/" + std::to_string(c.oppose);
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string render_markdown(const AspectHierarchy& tree) {
  std::ostringstream out;
  out << "# " << tree.claim() << "\n\n";
  if (!tree.complete) out << "_partial hierarchy: " << tree.failure << "_\n\n";
  auto walk = [&](auto&& self, const std::string& id) -> void {
    const auto& n = tree.node(id);
    const std::string indent(2 * n.depth, ' ');
    out << indent << "- **" << n.label << "** `" << n.node_id << "`";
    if (n.perspectives) {
      auto c = consensus_counts(tree, id);
      out << " segments " << counts_line(c.segments) << ", papers " << counts_line(c.papers)
          << " (" << consensus_ratio(c.papers) << "), subtree papers " << counts_line(c.subtree_papers);
    }
    out << '\n';
    if (!n.keywords.empty()) {
      out << indent << "  keywords:";
      for (std::size_t i = 0; i < n.keywords.size(); ++i) out << (i ? ", " : " ") << n.keywords[i];
      out << '\n';
    }
    if (n.perspectives) {
      const std::pair<const char*, const StanceBucket*> rows[] = {{"support", &n.perspectives->support},
                                                                  {"neutral", &n.perspectives->neutral},
                                                                  {"oppose", &n.perspectives->oppose}};
      for (const auto& [name, bucket] : rows) {
        if (bucket->summary.empty()) continue;
        out << indent << "  " << name << ": " << bucket->summary << '\n';
      }
    }
    for (const auto& c : n.children) self(self, c);
  };
  walk(walk, tree.root().node_id);
  return out.str();
}

std::string render_dot(const AspectHierarchy& tree) {
  std::ostringstream out;
  out << "digraph hierarchy {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const auto& n : tree.nodes()) {
    std::string label = n.label;
    if (n.perspectives) label += "\n" + counts_line(consensus_counts(tree, n.node_id).papers);
    out << "  \"" << n.node_id << "\" [label=\"" << dot_escape(label) << "\"];\n";
  }
  for (const auto& n : tree.nodes()) {
    for (const auto& c : n.children) out << "  \"" << n.node_id << "\" -> \"" << c << "\";\n";
  }
  out << "}\n";
  return out.str();
}

std::string render_report(const AspectHierarchy& tree, const std::string& format) {
  if (format == "md" || format == "markdown") return render_markdown(tree);
  if (format == "dot") return render_dot(tree);
  throw Error(ErrorCode::UnknownFormat, "unknown report format '" + format + "' (use md or dot)");
}

}  // namespace claimtree
