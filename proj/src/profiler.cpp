#include "flowlens/profiler.hpp"

#include <algorithm>
#include <map>

namespace flowlens {

const char* to_string(icicle_node::kind k) noexcept {
    switch (k) {
    case icicle_node::kind::root: return "root";
    case icicle_node::kind::block: return "block";
    case icicle_node::kind::leaf: return "node-leaf";
    case icicle_node::kind::overhead: return "overhead";
    }
    return "block";
}

std::optional<icicle_node::kind> parse_icicle_kind(std::string_view s) {
    for (auto k : {icicle_node::kind::root, icicle_node::kind::block, icicle_node::kind::leaf,
                   icicle_node::kind::overhead})
        if (s == to_string(k))
            return k;
    return std::nullopt;
}

namespace {

struct icicle_builder {
    const dataflow_desc& desc;
    std::map<const block_node*, std::vector<const timing_record*>> placed;

    std::optional<icicle_node> build(const block_node& b, bool is_root) {
        icicle_node out{b.label, is_root ? icicle_node::kind::root : icicle_node::kind::block, b.path, {}, 0, {}};
        if (auto it = placed.find(&b); it != placed.end()) {
            auto records = it->second;
            std::sort(records.begin(), records.end(),
                      [](const timing_record* x, const timing_record* y) { return x->node < y->node; });
            for (const auto* r : records) {
                out.children.push_back({std::string(to_string(desc.nodes[r->node].kind)) + " #" + std::to_string(r->node),
                                        icicle_node::kind::leaf, std::nullopt, r->node, r->duration_ns, {}});
            }
        }
        for (const auto& child : b.children)
            if (auto c = build(child, false))
                out.children.push_back(std::move(*c));
        if (!is_root && out.children.empty())
            return std::nullopt;
        for (const auto& c : out.children)
            out.value_ns += c.value_ns;
        return out;
    }
};

} // namespace

icicle_node build_icicle(const pulse& p, const profiling_map& map, const block_tree& blocks, const dataflow_desc& desc) {
    icicle_builder b{desc, {}};
    for (const auto& r : p.timings)
        b.placed[&blocks.nearest(path_for_node(map, r.node))].push_back(&r);
    auto root = *b.build(blocks.root, true);
    std::int64_t leaves = root.value_ns;
    root.children.push_back({"overhead", icicle_node::kind::overhead, std::nullopt, std::nullopt,
                             p.wall_total_ns - leaves, {}});
    root.value_ns = p.wall_total_ns;
    return root;
}

std::vector<node_table_row> node_table(const pulse& p, const dataflow_desc& desc, const profiling_map& map) {
    std::vector<node_table_row> rows;
    rows.reserve(p.timings.size());
    for (const auto& r : p.timings) {
        double share = p.wall_total_ns > 0 ? static_cast<double>(r.duration_ns) / static_cast<double>(p.wall_total_ns) : 0;
        rows.push_back({r.node, desc.nodes.at(r.node).kind, path_for_node(map, r.node), r.duration_ns, share});
    }
    std::sort(rows.begin(), rows.end(), [](const node_table_row& a, const node_table_row& b) {
        if (a.duration_ns != b.duration_ns)
            return a.duration_ns > b.duration_ns;
        return a.node < b.node;
    });
    return rows;
}

path_timing timings_for_path(const pulse& p, const profiling_map& map, const spec_path& path) {
    path_timing out;
    for (const auto& r : p.timings) {
        auto it = map.backward().find(r.node);
        if (it == map.backward().end() || !path.is_prefix_of(it->second))
            continue;
        out.total_ns += r.duration_ns;
        out.nodes.push_back(r.node);
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    return out;
}

} // namespace flowlens
