#include <doctest.h>

#include <fstream>
#include <future>
#include <httplib.h>
#include <thread>

#include "flowlens/flights.hpp"
#include "flowlens/server.hpp"
#include "support.hpp"

using namespace flowlens;

namespace {

json body(const http_reply& r) { return json::parse(r.body); }

json spec_body(const std::string& text) { return json{{"text", text}}; }

// Temporary data directory holding a generated flights.csv.
struct flights_dir {
    std::filesystem::path root;
    explicit flights_dir(std::size_t rows) {
        root = std::filesystem::temp_directory_path() / ("flowlens_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(root / "data");
        std::ofstream out(root / "data" / "flights.csv");
        write_flights_csv(out, rows, 42);
    }
    ~flights_dir() { std::filesystem::remove_all(root); }
};

double marks_share(const json& report) {
    auto r = report_from_json(report);
    const auto& p = r.pulses.at(0).data;
    return static_cast<double>(timings_for_path(r, 0, {"marks"}).total_ns) / static_cast<double>(p.wall_total_ns);
}

} // namespace

TEST_CASE("signal post adds a pulse") {
    service svc(testing::fixture_text("histogram"), testing::fixture_dir());
    CHECK(body(svc.get_report())["pulses"].size() == 1);
    auto r = svc.post_signal(R"({"name": "bins", "value": 3})");
    CHECK(r.status == 200);
    CHECK(body(r) == json{{"pulse", 1}});
    CHECK(body(svc.get_report())["pulses"].size() == 2);
    auto pulses = body(svc.get_pulses());
    REQUIRE(pulses.size() == 2);
    CHECK(pulses[1]["trigger"]["signal"] == "bins");
    CHECK(svc.get_scene().content_type == "image/svg+xml");
}

TEST_CASE("bad signal requests") {
    service svc(testing::fixture_text("histogram"), testing::fixture_dir());
    auto r = svc.post_signal(R"({"name": "nope", "value": 3})");
    CHECK(r.status == 400);
    CHECK(body(r)["error"]["kind"] == "UnknownSignal");
    CHECK(svc.post_signal("not json").status == 400);
    CHECK(svc.post_signal(R"({"name": "bins", "value": [1]})").status == 400);
    CHECK(body(svc.get_report())["pulses"].size() == 1);
}

TEST_CASE("syntax error in a posted spec carries line and column") {
    service svc(testing::fixture_text("minimal"), testing::fixture_dir());
    auto before = svc.get_report().body;
    auto r = svc.post_spec(spec_body("{\n  \"width\": 10,\n  \"height\": }").dump());
    CHECK(r.status == 400);
    auto e = body(r)["error"];
    CHECK(e["kind"] == "SyntaxError");
    CHECK(e["line"] == 3);
    CHECK(e["col"] == 13);
    CHECK(svc.get_report().body == before); // the old report stays
}

TEST_CASE("validation error in a posted spec carries path and span") {
    service svc(testing::fixture_text("minimal"), testing::fixture_dir());
    auto r = svc.post_spec(
        spec_body(R"({"data": [{"name": "t", "values": []}], "marks": [{"type": "rect", "from": "tt"}]})").dump());
    CHECK(r.status == 400);
    auto e = body(r)["error"];
    CHECK(e["kind"] == "ValidationError");
    CHECK(e["path"] == json::array({"marks", 0, "from"}));
    CHECK(e["span"]["start_line"] == 1);
    CHECK(e["col"] == e["span"]["start_col"]);
}

TEST_CASE("posted spec replaces the runtime") {
    service svc(testing::fixture_text("minimal"), testing::fixture_dir());
    auto r = svc.post_spec(spec_body(testing::fixture_text("bar_chart")).dump());
    CHECK(r.status == 200);
    CHECK(body(r) == body(svc.get_report()));
    CHECK(body(r)["dataflow"]["nodes"].size() > 3);
}

TEST_CASE("mutations answer 409 while a pulse is evaluating") {
    service svc(testing::fixture_text("histogram"), testing::fixture_dir());
    {
        auto guard = svc.hold_evaluation();
        auto r = std::async(std::launch::async, [&] { return svc.post_signal(R"({"name": "bins", "value": 3})"); }).get();
        CHECK(r.status == 409);
        auto s = std::async(std::launch::async, [&] { return svc.post_spec(spec_body("{}").dump()); }).get();
        CHECK(s.status == 409);
        // Reads still answer from the last snapshot.
        CHECK(svc.get_report().status == 200);
    }
    CHECK(svc.post_signal(R"({"name": "bins", "value": 3})").status == 200);
}

TEST_CASE("removing the symbol mark collapses the marks share") {
    flights_dir dir(20000);
    service svc(testing::fixture_text("flights_heatmap"), dir.root);
    double before = marks_share(body(svc.get_report()));
    auto r = svc.post_spec(spec_body(testing::fixture_text("flights_heatmap_no_symbol")).dump());
    REQUIRE(r.status == 200);
    double after = marks_share(body(r));
    CAPTURE(before);
    CAPTURE(after);
    CHECK(after <= 0.2 * before);
}

TEST_CASE("HTTP round trip") {
    service svc(testing::fixture_text("histogram"), testing::fixture_dir());
    http_server server(svc);
    int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.listen(); });
    httplib::Client cli("127.0.0.1", port);
    for (int i = 0; i < 100 && !cli.Get("/pulses"); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto rep = cli.Get("/report");
    REQUIRE(rep);
    CHECK(rep->status == 200);
    CHECK(json::parse(rep->body)["version"] == 1);
    auto sig = cli.Post("/signal", R"({"name": "bins", "value": 12})", "application/json");
    REQUIRE(sig);
    CHECK(json::parse(sig->body)["pulse"] == 1);
    auto scene = cli.Get("/scene");
    REQUIRE(scene);
    CHECK(scene->get_header_value("Content-Type") == "image/svg+xml");
    auto bad = cli.Post("/spec", R"({"text": "{"})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    server.stop();
    t.join();
}
