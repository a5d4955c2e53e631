#pragma once

#include <string>

#include "claimtree/hierarchy.hpp"

namespace claimtree {

// Nested bullet list, two spaces of indentation per depth level, with stance
// counts when perspectives are present.
std::string render_markdown(const AspectHierarchy& tree);

// Graphviz digraph with one node per aspect.
std::string render_dot(const AspectHierarchy& tree);

// format: "md" | "markdown" | "dot". Throws Error(UnknownFormat).
std::string render_report(const AspectHierarchy& tree, const std::string& format);

}  // namespace claimtree
