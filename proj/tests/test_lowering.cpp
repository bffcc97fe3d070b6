#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "flowlens/errors.hpp"
#include "flowlens/lowering.hpp"
#include "support.hpp"

using namespace flowlens;

namespace {

lowered_chart lower_text(const std::string& text) { return lower(validate(parse_spec(text))); }

std::vector<node_kind> kinds(const dataflow_desc& d) {
    std::vector<node_kind> out;
    for (const auto& n : d.nodes)
        out.push_back(n.kind);
    return out;
}

std::size_t count_kind(const dataflow_desc& d, node_kind k) {
    return static_cast<std::size_t>(
        std::count_if(d.nodes.begin(), d.nodes.end(), [&](const node_desc& n) { return n.kind == k; }));
}

const char* table_and_binned = R"({
  "data": [
    {"name": "table", "values": [{"v": 1}, {"v": 3}, {"v": 4}]},
    {"name": "binned", "source": "table",
     "transform": [{"type": "bin", "field": "v", "step": 2, "extent": [0, 10]},
                   {"type": "aggregate", "groupby": ["bin_start"], "ops": ["count"], "as": ["n"]}]}
  ],
  "marks": [{"type": "rect", "from": "binned"}]
})";

const char* inline_binned = R"({
  "data": [
    {"name": "table", "values": [{"v": 1}, {"v": 3}, {"v": 4}],
     "transform": [{"type": "bin", "field": "v", "step": 2, "extent": [0, 10]},
                   {"type": "aggregate", "groupby": ["bin_start"], "ops": ["count"], "as": ["n"]}]}
  ],
  "marks": [{"type": "rect", "from": "table"}]
})";

} // namespace

TEST_CASE("derived dataset with transforms gets a Copy node") {
    auto l = lower_text(table_and_binned);
    CHECK(kinds(l.desc) == std::vector<node_kind>{node_kind::source, node_kind::copy, node_kind::bin,
                                                    node_kind::aggregate, node_kind::render});
    CHECK(l.desc.nodes[1].origin == spec_path{"data", 1});
    CHECK(path_for_node(l.map, 1) == spec_path{"data", 1});
    CHECK(l.desc.nodes[2].origin == spec_path{"data", 1, "transform", 0});
    CHECK(l.desc.nodes[3].origin == spec_path{"data", 1, "transform", 1});
    CHECK(path_for_node(l.map, 4) == spec_path{"marks", 0});
    CHECK(l.desc.edges == std::vector<std::pair<node_id, node_id>>{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
}

TEST_CASE("inline transforms create no Copy node") {
    auto l = lower_text(inline_binned);
    CHECK(count_kind(l.desc, node_kind::copy) == 0);
    CHECK(kinds(l.desc) ==
          std::vector<node_kind>{node_kind::source, node_kind::bin, node_kind::aggregate, node_kind::render});
}

TEST_CASE("derived dataset without transforms aliases its source") {
    auto l = lower_text(R"({"data": [{"name": "a", "values": []}, {"name": "b", "source": "a"}],
                            "marks": [{"type": "symbol", "from": "b"}]})");
    CHECK(kinds(l.desc) == std::vector<node_kind>{node_kind::source, node_kind::render});
    CHECK(l.desc.edges == std::vector<std::pair<node_id, node_id>>{{0, 1}});
}

TEST_CASE("one signal and no data") {
    auto l = lower_text(R"({"signals": [{"name": "s", "value": 1}]})");
    REQUIRE(l.desc.nodes.size() == 1);
    CHECK(l.desc.nodes[0].kind == node_kind::signal);
    CHECK(l.desc.edges.empty());
    CHECK(l.desc.nodes[0].origin == spec_path{"signals", 0});
}

TEST_CASE("empty spec lowers to an empty graph") {
    auto l = lower_text("{}");
    CHECK(l.desc.nodes.empty());
    CHECK(l.map.forward().empty());
}

TEST_CASE("minimal fixture graph") {
    auto l = lower_text(testing::fixture_text("minimal"));
    CHECK(kinds(l.desc) == std::vector<node_kind>{node_kind::source, node_kind::encode, node_kind::render});
    CHECK(l.desc.edges == std::vector<std::pair<node_id, node_id>>{{0, 1}, {1, 2}});
    CHECK(nodes_for_path(l.map, {"marks", 0}, false) == std::vector<node_id>{1, 2});
    CHECK(l.desc.inputs_of(2) == std::vector<node_id>{1});
    CHECK(l.desc.outputs_of(0) == std::vector<node_id>{1});
}

TEST_CASE("block queries") {
    auto l = lower_text(R"({"data": [{"name": "t", "values": [],
                              "transform": [{"type": "filter", "expr": "true"}, {"type": "formula", "expr": "1", "as": "o"}]}]})");
    CHECK(nodes_for_path(l.map, {"data", 0}, true) == std::vector<node_id>{0, 1, 2});
    CHECK(nodes_for_path(l.map, {"data", 0}, false) == std::vector<node_id>{0});
    CHECK(nodes_for_path(l.map, {}, true) == std::vector<node_id>{0, 1, 2});
    CHECK(nodes_for_path(l.map, {"data", 7}, true).empty());
    CHECK(nodes_for_path(l.map, {"nope"}, false).empty());
    CHECK_THROWS_AS(path_for_node(l.map, 9999), unknown_node);
}

TEST_CASE("shared scale is attributed to the scale definition") {
    auto l = lower_text(testing::fixture_text("bar_chart"));
    for (const auto& n : l.desc.nodes) {
        if (n.kind == node_kind::scale || n.kind == node_kind::scale_domain) {
            CHECK(n.origin.size() == 2);
            CHECK(n.origin[0].key() == "scales");
            // Used by a mark and an axis, still one node per scale.
            CHECK(nodes_for_path(l.map, n.origin, false).size() <= 2);
        }
    }
    CHECK(count_kind(l.desc, node_kind::scale) == 2);
    CHECK(count_kind(l.desc, node_kind::scale_domain) == 1); // y has a literal domain
}

TEST_CASE("fixtures cover every node kind") {
    std::set<node_kind> seen;
    for (const auto& f : testing::all_fixtures())
        for (const auto& n : lower_text(read_text_file(f.spec)).desc.nodes)
            seen.insert(n.kind);
    CHECK(seen.size() == 14);
}

TEST_CASE("structural invariants on every fixture") {
    for (const auto& f : testing::all_fixtures()) {
        CAPTURE(f.name);
        auto l = lower_text(read_text_file(f.spec));
        const auto& d = l.desc;
        for (std::size_t i = 0; i < d.nodes.size(); ++i)
            CHECK(d.nodes[i].id == i);
        std::set<std::pair<node_id, node_id>> unique(d.edges.begin(), d.edges.end());
        CHECK(unique.size() == d.edges.size());
        CHECK(topological_order(d.nodes.size(), d.edges).size() == d.nodes.size());
        for (const auto& n : d.nodes) {
            auto ins = d.inputs_of(n.id).size();
            if (n.kind == node_kind::source || n.kind == node_kind::signal)
                CHECK(ins == 0);
            else if (n.kind != node_kind::scale) // literal-domain scales have no inputs
                CHECK(ins >= 1);
        }
        CHECK(l.map.backward().size() == d.nodes.size());
        for (const auto& [path, ids] : l.map.forward())
            for (auto id : ids)
                CHECK(l.map.backward().at(id) == path);
    }
}

TEST_CASE("lowering is deterministic") {
    for (const auto& f : testing::all_fixtures()) {
        auto text = read_text_file(f.spec);
        auto a = lower_text(text);
        auto b = lower_text(text);
        CHECK(a.desc == b.desc);
        CHECK(a.map == b.map);
    }
}

TEST_CASE("malformed filter expression fails lowering at its path") {
    try {
        lower_text(R"({"data": [{"name": "t", "values": [], "transform": [{"type": "filter", "expr": "datum. > 1"}]}]})");
        FAIL("expected an expression error");
    } catch (const expression_error& e) {
        CHECK(*e.path() == spec_path{"data", 0, "transform", 0, "expr"});
    }
}

TEST_CASE("undeclared signal in an expression fails lowering") {
    CHECK_THROWS_AS(
        lower_text(R"({"data": [{"name": "t", "values": [], "transform": [{"type": "filter", "expr": "datum.a > k"}]}]})"),
        error);
}

TEST_CASE("topological order picks the smallest ready id") {
    // Diamond 0->1, 0->2, 1->3, 2->3 with an independent node 4.
    std::vector<std::pair<node_id, node_id>> e{{0, 2}, {0, 1}, {2, 3}, {1, 3}};
    CHECK(topological_order(5, e) == std::vector<node_id>{0, 1, 2, 3, 4});
    CHECK(topological_order(3, {{2, 0}, {0, 1}}) == std::vector<node_id>{2, 0, 1});
    CHECK_THROWS_AS(topological_order(2, {{0, 1}, {1, 0}}), lowering_error);
    CHECK(reachable_from(5, e, 1) == std::vector<node_id>{1, 3});
    CHECK(reachable_from(5, e, 4) == std::vector<node_id>{4});
}

TEST_CASE("topological order respects every edge on random DAGs") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 20;
        std::vector<node_id> perm(n);
        for (std::size_t i = 0; i < n; ++i)
            perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::pair<node_id, node_id>> edges;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (rng() % 4 == 0)
                    edges.emplace_back(perm[a], perm[b]);
        auto order = topological_order(n, edges);
        REQUIRE(order.size() == n);
        std::vector<std::size_t> pos(n);
        for (std::size_t i = 0; i < n; ++i)
            pos[order[i]] = i;
        for (auto [a, b] : edges)
            CHECK(pos[a] < pos[b]);
    }
}
