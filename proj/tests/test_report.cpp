#include <doctest.h>

#include "flowlens/errors.hpp"
#include "flowlens/report.hpp"
#include "support.hpp"

using namespace flowlens;

namespace {

// Expects a schema error whose message mentions `where`.
void expect_schema_error(const json& j, const std::string& where) {
    CAPTURE(where);
    try {
        report_from_json(j);
        FAIL("expected a schema error");
    } catch (const schema_error& e) {
        CHECK(std::string(e.what()).find(where) != std::string::npos);
    }
}

} // namespace

TEST_CASE("reports round-trip on every fixture") {
    for (const auto& f : testing::all_fixtures()) {
        CAPTURE(f.name);
        auto s = testing::open_fixture(f);
        auto r = s->report();
        auto text = serialize_report(r);
        auto back = deserialize_report(text);
        CHECK(back == r);
        CHECK(serialize_report(back) == text);
    }
}

TEST_CASE("report top-level layout") {
    auto s = testing::open_fixture("bar_chart", false);
    auto j = report_to_json(s->report());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items())
        keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"version", "spec", "dataflow", "mapping", "pulses", "scene"});
    CHECK(j["version"] == 1);
    CHECK(j["pulses"][0]["trigger"] == "init");
    CHECK(j["dataflow"]["nodes"][0]["kind"] == "Source");
    CHECK(j["scene"]["svg"].get<std::string>().rfind("<svg", 0) == 0);
}

TEST_CASE("span table covers blocks and node origins") {
    auto s = testing::open_fixture("bar_chart", false);
    auto r = s->report();
    auto has = [&](const spec_path& p) {
        return std::any_of(r.spans.begin(), r.spans.end(), [&](const span_entry& e) { return e.path == p; });
    };
    CHECK(has({}));
    CHECK(has({"marks"}));
    CHECK(has({"marks", 0, "encode", "update"}));
    CHECK(has({"scales", 1}));
    for (const auto& e : r.spans)
        CHECK(e.span == span_of(s->doc(), e.path));
    CHECK(std::is_sorted(r.spans.begin(), r.spans.end(),
                         [](const span_entry& a, const span_entry& b) { return a.path < b.path; }));
}

TEST_CASE("missing pulses key") {
    auto s = testing::open_fixture("minimal", false);
    auto j = report_to_json(s->report());
    j.erase("pulses");
    expect_schema_error(j, "pulses");
}

TEST_CASE("schema errors locate the problem") {
    auto s = testing::open_fixture("minimal", false);
    auto good = report_to_json(s->report());

    auto j = good;
    j["version"] = 2;
    expect_schema_error(j, "/version");
    j = good;
    j["dataflow"]["nodes"][1]["kind"] = "Teleport";
    expect_schema_error(j, "/dataflow/nodes/1/kind");
    j = good;
    j["mapping"]["backward"][0]["path"] = json::array({"data", 3});
    expect_schema_error(j, "/mapping");
    j = good;
    j["pulses"][0]["timings"][0]["node"] = 99;
    expect_schema_error(j, "/pulses/0");
    j = good;
    j["dataflow"]["edges"][0] = json::array({0, 7});
    expect_schema_error(j, "/dataflow/edges/0");
    j = good;
    j["pulses"][0]["icicle"]["value_ns"] = -1;
    expect_schema_error(j, "/pulses/0/icicle");
    CHECK_THROWS_AS(deserialize_report("{"), schema_error);
    CHECK_THROWS_AS(deserialize_report("[]"), schema_error);
}

TEST_CASE("three-node fixture has three node-table rows") {
    auto s = testing::open_fixture("minimal", false);
    auto r = s->report();
    REQUIRE(r.dataflow.nodes.size() == 3);
    CHECK(r.pulses.at(0).table.size() == 3);
}

TEST_CASE("timings for a path through the report") {
    auto s = testing::open_fixture("scatter_filter");
    auto r = s->report();
    auto direct = timings_for_path(s->rt().pulses()[2], s->lowered().map, {"signals", 1});
    auto via = timings_for_path(r, 2, {"signals", 1});
    CHECK(via.total_ns == direct.total_ns);
    CHECK(via.nodes == direct.nodes);
    CHECK_THROWS_AS(timings_for_path(r, 9, {}), unknown_pulse);
}

TEST_CASE("scene summary counts items per layer") {
    auto s = testing::open_fixture("bar_chart", false);
    auto r = s->report();
    REQUIRE(r.layers.size() == 3);
    CHECK(r.layers[0].role == "axis");
    CHECK(r.layers[2].role == "mark");
    CHECK(r.layers[2].items == 4);
    CHECK(r.layers[2].origin == spec_path{"marks", 0});
}
