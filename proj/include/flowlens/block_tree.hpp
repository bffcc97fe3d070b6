#pragma once

#include <string>
#include <vector>

#include "flowlens/chart_spec.hpp"
#include "flowlens/spec_document.hpp"
#include "flowlens/spec_path.hpp"

namespace flowlens {

// Hierarchy of spec blocks. Level 1 holds the top-level sections, level 2 their
// entries, deeper levels transform entries and encode groups.
struct block_node {
    spec_path path;
    std::string label;
    std::vector<block_node> children;

    friend bool operator==(const block_node&, const block_node&) = default;
};

struct block_tree {
    block_node root; // path [], label "spec"

    // Deepest block whose path is a prefix of `path`; the root when nothing deeper matches.
    const block_node& nearest(const spec_path& path) const;
};

// Sections appear in document order; empty or absent sections are omitted.
block_tree block_hierarchy(const spec_document& doc, const chart_spec& chart);

} // namespace flowlens
