#pragma once

#include <random>
#include <string>

#include "flowlens/json_util.hpp"

namespace flowlens::testing {

// Random chart spec whose dataflow graph is a random DAG: derived datasets chained off
// earlier ones, filters and formulas reading random signals, marks over random datasets.
// Callers reject results above their node budget.
inline std::string random_spec(std::mt19937_64& rng) {
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
    json spec = json::object();
    spec["width"] = 100;
    spec["height"] = 100;

    std::size_t nsignals = 1 + pick(3);
    json signals = json::array();
    for (std::size_t i = 0; i < nsignals; ++i)
        signals.push_back({{"name", "s" + std::to_string(i)}, {"value", static_cast<double>(pick(10))}});

    json values = json::array();
    for (int i = 0; i < 6; ++i)
        values.push_back({{"a", i}, {"b", static_cast<double>(pick(20))}});
    json data = json::array();
    data.push_back({{"name", "d0"}, {"values", values}});
    std::size_t ndata = 1 + pick(4);
    for (std::size_t i = 1; i < ndata; ++i) {
        json d = {{"name", "d" + std::to_string(i)}, {"source", "d" + std::to_string(pick(i))}};
        json transforms = json::array();
        std::size_t nt = pick(3);
        for (std::size_t t = 0; t < nt; ++t) {
            auto s = "s" + std::to_string(pick(nsignals));
            if (pick(2) == 0)
                transforms.push_back({{"type", "filter"}, {"expr", "datum.a >= " + s}});
            else
                transforms.push_back({{"type", "formula"}, {"expr", "datum.b * " + s}, {"as", "f"}});
        }
        if (!transforms.empty())
            d["transform"] = transforms;
        data.push_back(d);
    }

    json marks = json::array();
    std::size_t nmarks = pick(3);
    for (std::size_t i = 0; i < nmarks; ++i) {
        json enter = {{"x", {{"field", "a"}}}, {"y", {{"field", "b"}}}};
        if (pick(2) == 0)
            enter["size"] = {{"signal", "s" + std::to_string(pick(nsignals))}};
        json m = {{"type", pick(2) ? "symbol" : "rect"}, {"from", "d" + std::to_string(pick(ndata))}};
        if (pick(4) != 0)
            m["encode"] = {{"enter", enter}};
        marks.push_back(m);
    }

    spec["data"] = data;
    spec["signals"] = signals;
    if (!marks.empty())
        spec["marks"] = marks;
    return spec.dump(2);
}

} // namespace flowlens::testing
