#pragma once

#include <algorithm>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "flowlens/runtime.hpp"
#include "flowlens/session.hpp"

namespace flowlens::testing {

inline std::filesystem::path fixture_dir() { return FLOWLENS_FIXTURE_DIR; }

struct fixture {
    std::string name;
    std::filesystem::path spec;
    std::filesystem::path events; // empty when the fixture has no script
};

// Every fixture spec, sorted by name.
inline std::vector<fixture> all_fixtures() {
    std::vector<fixture> out;
    for (const auto& e : std::filesystem::directory_iterator(fixture_dir())) {
        auto name = e.path().filename().string();
        if (e.path().extension() != ".json" || name.find(".events.") != std::string::npos)
            continue;
        auto stem = e.path().stem().string();
        auto ev = fixture_dir() / (stem + ".events.json");
        out.push_back({stem, e.path(), std::filesystem::exists(ev) ? ev : std::filesystem::path()});
    }
    std::sort(out.begin(), out.end(), [](const fixture& a, const fixture& b) { return a.name < b.name; });
    return out;
}

inline std::string fixture_text(const std::string& name) { return read_text_file(fixture_dir() / (name + ".json")); }

inline std::unique_ptr<session> open_fixture(const fixture& f, bool with_events = true) {
    auto s = std::make_unique<session>(read_text_file(f.spec), fixture_dir());
    if (with_events && !f.events.empty())
        for (const auto& e : parse_events(read_text_file(f.events)))
            s->apply(e);
    return s;
}

inline std::unique_ptr<session> open_fixture(const std::string& name, bool with_events = true) {
    for (const auto& f : all_fixtures())
        if (f.name == name)
            return open_fixture(f, with_events);
    throw std::runtime_error("no fixture " + name);
}

inline std::unique_ptr<session> open_text(const std::string& text) {
    return std::make_unique<session>(text, fixture_dir());
}

} // namespace flowlens::testing
