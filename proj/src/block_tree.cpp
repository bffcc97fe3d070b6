#include "flowlens/block_tree.hpp"

namespace flowlens {

const block_node& block_tree::nearest(const spec_path& path) const {
    const block_node* node = &root;
    bool descended = true;
    while (descended) {
        descended = false;
        for (const auto& child : node->children) {
            if (child.path.is_prefix_of(path)) {
                node = &child;
                descended = true;
                break;
            }
        }
    }
    return *node;
}

namespace {

std::string indexed(const char* prefix, std::size_t i, const std::string& suffix) {
    return std::string(prefix) + "[" + std::to_string(i) + "]:" + suffix;
}

block_node section(const std::string& key, const chart_spec& chart) {
    block_node node{spec_path{key}, key, {}};
    if (key == "data") {
        for (std::size_t i = 0; i < chart.datasets.size(); ++i) {
            const auto& d = chart.datasets[i];
            block_node entry{d.origin, "data:" + d.name, {}};
            for (std::size_t j = 0; j < d.transforms.size(); ++j)
                entry.children.push_back(
                    {d.transforms[j].origin, indexed("transform", j, to_string(d.transforms[j].kind())), {}});
            node.children.push_back(std::move(entry));
        }
    } else if (key == "signals") {
        for (const auto& s : chart.signals)
            node.children.push_back({s.origin, "signals:" + s.name, {}});
    } else if (key == "scales") {
        for (const auto& s : chart.scales)
            node.children.push_back({s.origin, "scales:" + s.name, {}});
    } else if (key == "marks") {
        for (std::size_t i = 0; i < chart.marks.size(); ++i) {
            const auto& m = chart.marks[i];
            block_node entry{m.origin, indexed("marks", i, to_string(m.type)), {}};
            for (const auto& g : m.groups)
                entry.children.push_back({g.origin, "encode:" + g.name, {}});
            node.children.push_back(std::move(entry));
        }
    } else if (key == "axes") {
        for (std::size_t i = 0; i < chart.axes.size(); ++i)
            node.children.push_back({chart.axes[i].origin, indexed("axes", i, to_string(chart.axes[i].orient)), {}});
    }
    return node;
}

} // namespace

block_tree block_hierarchy(const spec_document& doc, const chart_spec& chart) {
    block_tree tree{{spec_path{}, "spec", {}}};
    for (const auto& m : doc.root().members) {
        auto sec = section(m.key, chart);
        if (!sec.children.empty())
            tree.root.children.push_back(std::move(sec));
    }
    return tree;
}

} // namespace flowlens
