#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flowlens/chart_spec.hpp"
#include "flowlens/lowering.hpp"
#include "flowlens/operators.hpp"
#include "flowlens/scene.hpp"

namespace flowlens {

using operator_output = std::variant<std::monostate, table_ptr, scalar, ops::extent_value, ops::domain_value,
                                     ops::scale_value, ops::encoded_items, ops::tick_list, scene_layer>;

// Value equality; tables compare by content rather than by pointer.
bool outputs_equal(const operator_output& a, const operator_output& b);

// Rows, items or ticks carried by an output; 0 for scalars and scale values.
std::size_t cardinality(const operator_output& out);

struct signal_update {
    std::string name;
    scalar value;
    friend bool operator==(const signal_update&, const signal_update&) = default;
};

struct timing_record {
    node_id node = 0;
    std::int64_t duration_ns = 0;
    std::size_t seq = 0;
    friend bool operator==(const timing_record&, const timing_record&) = default;
};

// rows_in: cardinality of the node's data input(s); rows_out: cardinality of its output;
// changed: output differs from the one cached before this pulse (always true in pulse 0).
struct data_delta {
    node_id node = 0;
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    bool changed = false;
    friend bool operator==(const data_delta&, const data_delta&) = default;
};

struct pulse {
    std::size_t id = 0;
    std::optional<signal_update> trigger; // empty for the initial pulse
    std::int64_t wall_total_ns = 0;
    std::vector<node_id> evaluated; // ascending
    std::vector<timing_record> timings; // evaluation order
    std::vector<data_delta> data_deltas; // ascending node id
    friend bool operator==(const pulse&, const pulse&) = default;
};

using operator_fn = std::function<operator_output(const std::vector<operator_output>& outputs)>;

// Evaluable operator annotated with the dataflow node it implements.
struct operator_instance {
    node_id id = 0;
    node_kind kind = node_kind::source;
    spec_path origin;
    std::vector<node_id> data_inputs; // inputs counted for rows_in
    operator_fn fn;
};

class runtime {
public:
    // Loads inline and url data (relative to `data_dir`) and compiles every operator.
    // Throws data_load_error / expression_error.
    runtime(dataflow_desc desc, const chart_spec& chart, const std::filesystem::path& data_dir);
    runtime(const runtime&) = delete; // Signal operators refer back to the runtime
    runtime& operator=(const runtime&) = delete;

    // Overrides a signal's initial value; only before run_initial.
    void set_initial_signal(const std::string& name, const scalar& value);

    const pulse& run_initial();                         // throws eval_error; logic_error if already run
    const pulse& apply_signal(const signal_update& u); // throws unknown_signal / eval_error

    const dataflow_desc& desc() const noexcept { return desc_; }
    const std::vector<node_id>& order() const noexcept { return order_; }
    const std::vector<operator_instance>& operators() const noexcept { return ops_; }
    const std::vector<pulse>& pulses() const noexcept { return pulses_; }
    const operator_output& output(node_id n) const { return outputs_.at(n); }
    const std::map<std::string, scalar>& signal_values() const noexcept { return signal_values_; }

    // Render outputs in layer order: axes first, then marks, each in spec order.
    scene_graph scene() const;

private:
    const pulse& evaluate(std::vector<node_id> dirty, std::optional<signal_update> trigger);

    dataflow_desc desc_;
    double width_, height_;
    std::vector<operator_instance> ops_;
    std::vector<node_id> order_;
    std::vector<std::size_t> rank_; // position in order_
    std::vector<operator_output> outputs_;
    std::map<std::string, scalar> signal_values_;
    std::map<std::string, node_id> signal_nodes_;
    std::vector<pulse> pulses_;
};

// Reads an event script: [{"signal": name, "value": scalar}, ...]. Throws std::invalid_argument.
std::vector<signal_update> parse_events(std::string_view text);

} // namespace flowlens
