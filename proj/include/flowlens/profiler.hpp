#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowlens/block_tree.hpp"
#include "flowlens/lowering.hpp"
#include "flowlens/runtime.hpp"

namespace flowlens {

struct icicle_node {
    enum class kind { root, block, leaf, overhead };

    std::string label;
    kind type = kind::block;
    std::optional<spec_path> path; // root and blocks
    std::optional<node_id> node;   // leaves
    std::int64_t value_ns = 0;
    std::vector<icicle_node> children;

    friend bool operator==(const icicle_node&, const icicle_node&) = default;
};

const char* to_string(icicle_node::kind k) noexcept; // "root", "block", "node-leaf", "overhead"
std::optional<icicle_node::kind> parse_icicle_kind(std::string_view s);

// Leaves sit under the deepest block containing their node's origin. Within a block, leaves
// (ascending id) precede child blocks; blocks without leaves below them are dropped. The root
// ends with an overhead leaf holding wall_total minus the summed leaves.
icicle_node build_icicle(const pulse& p, const profiling_map& map, const block_tree& blocks, const dataflow_desc& desc);

struct node_table_row {
    node_id node = 0;
    node_kind kind = node_kind::source;
    spec_path origin;
    std::int64_t duration_ns = 0;
    double share = 0; // of wall_total
    friend bool operator==(const node_table_row&, const node_table_row&) = default;
};

// One row per timing record, slowest first, ties by ascending id.
std::vector<node_table_row> node_table(const pulse& p, const dataflow_desc& desc, const profiling_map& map);

struct path_timing {
    std::int64_t total_ns = 0;
    std::vector<node_id> nodes; // ascending
};

// Sums the records whose node origin lies at or below `path`.
path_timing timings_for_path(const pulse& p, const profiling_map& map, const spec_path& path);

} // namespace flowlens
