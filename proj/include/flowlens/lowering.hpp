#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowlens/chart_spec.hpp"
#include "flowlens/json_util.hpp"
#include "flowlens/spec_path.hpp"

namespace flowlens {

using node_id = std::size_t;

enum class node_kind {
    source, copy, filter, formula, extent, bin, aggregate, collect,
    signal, scale_domain, scale, encode, axis_ticks, render
};

const char* to_string(node_kind k) noexcept; // "Source", "Copy", ...
std::optional<node_kind> parse_node_kind(std::string_view s);

// One operator of the dataflow description. `params` is self-contained: it names its input
// node ids, so the runtime can be instantiated from the description alone.
struct node_desc {
    node_id id = 0;
    node_kind kind = node_kind::source;
    json params = json::object();
    spec_path origin;

    friend bool operator==(const node_desc&, const node_desc&) = default;
};

struct dataflow_desc {
    std::vector<node_desc> nodes;                 // nodes[i].id == i
    std::vector<std::pair<node_id, node_id>> edges; // (from, to), deduplicated, in creation order

    std::vector<node_id> inputs_of(node_id n) const;
    std::vector<node_id> outputs_of(node_id n) const;

    friend bool operator==(const dataflow_desc&, const dataflow_desc&) = default;
};

// Kahn order, smallest ready id first. Throws lowering_error if the edges have a cycle.
std::vector<node_id> topological_order(std::size_t node_count, const std::vector<std::pair<node_id, node_id>>& edges);

// Nodes reachable from `start` along edges, `start` included, ascending.
std::vector<node_id> reachable_from(std::size_t node_count, const std::vector<std::pair<node_id, node_id>>& edges,
                                    node_id start);

// Spec path <-> dataflow node index built while lowering.
class profiling_map {
public:
    void record(const spec_path& path, node_id node);

    const std::map<spec_path, std::vector<node_id>>& forward() const noexcept { return forward_; }
    const std::map<node_id, spec_path>& backward() const noexcept { return backward_; }

    friend bool operator==(const profiling_map&, const profiling_map&) = default;

private:
    std::map<spec_path, std::vector<node_id>> forward_;
    std::map<node_id, spec_path> backward_;
};

struct lowered_chart {
    dataflow_desc desc;
    profiling_map map;
};

// First lowering phase: chart -> dataflow description, recording each node's origin.
// Ids follow visit order: datasets (sources before dependents), signals, scales, marks, axes.
// Throws expression_error / lowering_error carrying the offending path.
lowered_chart lower(const chart_spec& chart);

// Block query. With descendants: union over all paths having `path` as prefix, ascending ids.
std::vector<node_id> nodes_for_path(const profiling_map& map, const spec_path& path, bool include_descendants);

// Throws unknown_node.
const spec_path& path_for_node(const profiling_map& map, node_id node);

} // namespace flowlens
