#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowlens/block_tree.hpp"
#include "flowlens/json_util.hpp"
#include "flowlens/lowering.hpp"
#include "flowlens/profiler.hpp"
#include "flowlens/runtime.hpp"
#include "flowlens/spec_document.hpp"

namespace flowlens {

inline constexpr int report_version = 1;

struct span_entry {
    spec_path path;
    spec_span span;
    friend bool operator==(const span_entry&, const span_entry&) = default;
};

struct pulse_report {
    pulse data;
    icicle_node icicle;
    std::vector<node_table_row> table;
    friend bool operator==(const pulse_report&, const pulse_report&) = default;
};

struct layer_summary {
    std::string role, type;
    std::size_t index = 0;
    spec_path origin;
    std::size_t items = 0;
    friend bool operator==(const layer_summary&, const layer_summary&) = default;
};

struct profile_report {
    int version = report_version;
    std::string spec_text;
    std::vector<span_entry> spans; // ascending path
    dataflow_desc dataflow;
    profiling_map mapping;
    std::vector<pulse_report> pulses;
    std::string svg;
    std::vector<layer_summary> layers;

    friend bool operator==(const profile_report&, const profile_report&) = default;
};

// Span table covers every block, every node origin and all their ancestors.
profile_report build_report(const spec_document& doc, const lowered_chart& lowered, const block_tree& blocks,
                            const runtime& rt);

json report_to_json(const profile_report& r);
std::string serialize_report(const profile_report& r); // pretty-printed, stable key order

// Checks structure and cross-references. Throws schema_error whose path is the JSON
// location of the problem inside the report.
profile_report report_from_json(const json& j);
profile_report deserialize_report(std::string_view text);

// Throws unknown_pulse.
path_timing timings_for_path(const profile_report& r, std::size_t pulse_id, const spec_path& path);

} // namespace flowlens
