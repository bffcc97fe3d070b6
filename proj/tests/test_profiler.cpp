#include <doctest.h>

#include <functional>
#include <set>

#include "flowlens/profiler.hpp"
#include "support.hpp"

using namespace flowlens;

namespace {

// Block values equal their children's sums; returns the leaves found.
void check_conservation(const icicle_node& n, std::vector<node_id>& leaves) {
    if (n.type == icicle_node::kind::leaf) {
        REQUIRE(n.node);
        leaves.push_back(*n.node);
        CHECK(n.children.empty());
        return;
    }
    if (n.type == icicle_node::kind::overhead) {
        CHECK(n.value_ns >= 0);
        return;
    }
    std::int64_t sum = 0;
    for (const auto& c : n.children) {
        sum += c.value_ns;
        check_conservation(c, leaves);
    }
    CHECK(n.value_ns == sum);
}

} // namespace

TEST_CASE("single source icicle") {
    auto s = testing::open_text(R"({"data": [{"name": "table", "values": [{"a": 1}]}]})");
    pulse p;
    p.timings = {{0, 700, 0}};
    p.wall_total_ns = 1000;
    p.evaluated = {0};
    auto ice = build_icicle(p, s->lowered().map, s->blocks(), s->lowered().desc);
    CHECK(ice.type == icicle_node::kind::root);
    CHECK(ice.value_ns == 1000);
    REQUIRE(ice.children.size() == 2);
    CHECK(ice.children[0].label == "data");
    CHECK(ice.children[0].value_ns == 700);
    CHECK(ice.children[1].type == icicle_node::kind::overhead);
    CHECK(ice.children[1].value_ns == 300);
    const auto& entry = ice.children[0].children.at(0);
    CHECK(entry.label == "data:table");
    REQUIRE(entry.children.size() == 1);
    CHECK(entry.children[0].label == "Source #0");
    CHECK(entry.children[0].node == node_id{0});
    CHECK(entry.children[0].value_ns == 700);
}

TEST_CASE("leaves sit under their transform block; unused blocks are dropped") {
    auto s = testing::open_fixture("histogram", false);
    const auto& p0 = s->rt().pulses()[0];
    auto ice = build_icicle(p0, s->lowered().map, s->blocks(), s->lowered().desc);
    std::vector<std::string> level1;
    for (const auto& c : ice.children)
        level1.push_back(c.label);
    CHECK(level1 == std::vector<std::string>{"data", "signals", "scales", "marks", "axes", "overhead"});

    const auto& scores = ice.children[0].children.at(0);
    REQUIRE(scores.children.size() == 4); // Source leaf, then three transform blocks
    CHECK(scores.children[0].type == icicle_node::kind::leaf);
    CHECK(scores.children[1].label == "transform[0]:extent");
    CHECK(scores.children[1].children.at(0).label == "Extent #1");

    // Pulse for the maxbins signal: no Source, no Extent, no axes.
    const auto& p1 = s->apply({"bins", 3.0});
    auto ice1 = build_icicle(p1, s->lowered().map, s->blocks(), s->lowered().desc);
    std::vector<std::string> labels;
    for (const auto& c : ice1.children)
        labels.push_back(c.label);
    CHECK(labels == std::vector<std::string>{"data", "signals", "scales", "marks", "overhead"});
    const auto& scores1 = ice1.children[0].children.at(0);
    CHECK(scores1.children.size() == 2); // bin and aggregate blocks only
}

TEST_CASE("icicle conservation on every fixture pulse") {
    for (const auto& f : testing::all_fixtures()) {
        CAPTURE(f.name);
        auto s = testing::open_fixture(f);
        for (const auto& p : s->rt().pulses()) {
            auto ice = build_icicle(p, s->lowered().map, s->blocks(), s->lowered().desc);
            CHECK(ice.value_ns == p.wall_total_ns);
            std::vector<node_id> leaves;
            check_conservation(ice, leaves);
            std::sort(leaves.begin(), leaves.end());
            std::vector<node_id> timed;
            for (const auto& t : p.timings)
                timed.push_back(t.node);
            std::sort(timed.begin(), timed.end());
            CHECK(leaves == timed);
            CHECK(ice.children.back().type == icicle_node::kind::overhead);
        }
    }
}

TEST_CASE("node table order and shares") {
    auto s = testing::open_fixture("minimal", false);
    pulse p;
    p.timings = {{0, 5, 0}, {1, 9, 1}};
    p.wall_total_ns = 20;
    auto rows = node_table(p, s->lowered().desc, s->lowered().map);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].node == 1);
    CHECK(rows[1].node == 0);
    CHECK(rows[0].share == doctest::Approx(0.45));
    CHECK(rows[0].kind == node_kind::encode);
    CHECK(rows[0].origin == spec_path{"marks", 0});

    p.timings = {{2, 4, 0}, {0, 4, 1}, {1, 4, 2}};
    rows = node_table(p, s->lowered().desc, s->lowered().map);
    CHECK(rows[0].node == 0);
    CHECK(rows[1].node == 1);
    CHECK(rows[2].node == 2);

    const auto& real = s->rt().pulses()[0];
    rows = node_table(real, s->lowered().desc, s->lowered().map);
    double share = 0;
    std::int64_t sum = 0;
    for (const auto& r : rows) {
        share += r.share;
        sum += r.duration_ns;
    }
    CHECK(share == doctest::Approx(static_cast<double>(sum) / static_cast<double>(real.wall_total_ns)));
}

TEST_CASE("timings for a path") {
    auto s = testing::open_fixture("bar_chart", false);
    const auto& p = s->rt().pulses()[0];
    auto all = timings_for_path(p, s->lowered().map, {});
    std::int64_t sum = 0;
    for (const auto& t : p.timings)
        sum += t.duration_ns;
    CHECK(all.total_ns == sum);
    CHECK(all.nodes.size() == p.timings.size());
    auto none = timings_for_path(p, s->lowered().map, {"nope"});
    CHECK(none.total_ns == 0);
    CHECK(none.nodes.empty());
    auto mark = timings_for_path(p, s->lowered().map, {"marks", 0});
    CHECK(mark.nodes == nodes_for_path(s->lowered().map, {"marks", 0}, true));
}

TEST_CASE("icicle kind names") {
    for (auto k : {icicle_node::kind::root, icicle_node::kind::block, icicle_node::kind::leaf,
                   icicle_node::kind::overhead})
        CHECK(parse_icicle_kind(to_string(k)) == k);
    CHECK(std::string(to_string(icicle_node::kind::leaf)) == "node-leaf");
    CHECK_FALSE(parse_icicle_kind("twig"));
}
