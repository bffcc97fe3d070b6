#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flowlens/spec_document.hpp"
#include "flowlens/spec_path.hpp"
#include "flowlens/value.hpp"

namespace flowlens {

// Reference to a named reactive value ({"signal": name} in the spec).
struct signal_ref {
    std::string name;
    friend bool operator==(const signal_ref&, const signal_ref&) = default;
};

// Literal number or signal reference.
using numeric_param = std::variant<double, signal_ref>;

enum class transform_kind { filter, formula, extent, bin, aggregate, collect };
enum class aggregate_op { count, sum, mean, min, max };
enum class scale_type { linear, band, ordinal };
enum class mark_type { symbol, rect, line, text };
enum class axis_orient { bottom, left, top, right };

enum class channel { x, y, x2, y2, width, height, size, opacity, fill, stroke, text };
inline constexpr std::size_t channel_count = 11;

const char* to_string(transform_kind k) noexcept;
const char* to_string(aggregate_op op) noexcept;
const char* to_string(scale_type t) noexcept;
const char* to_string(mark_type t) noexcept;
const char* to_string(axis_orient o) noexcept;
const char* to_string(channel c) noexcept;

std::optional<transform_kind> parse_transform_kind(std::string_view s);
std::optional<aggregate_op> parse_aggregate_op(std::string_view s);
std::optional<scale_type> parse_scale_type(std::string_view s);
std::optional<mark_type> parse_mark_type(std::string_view s);
std::optional<axis_orient> parse_axis_orient(std::string_view s);
std::optional<channel> parse_channel(std::string_view s);

struct filter_def {
    std::string expr;
};

struct formula_def {
    std::string expr;
    std::string as;
};

// Computes [min, max] of a field and publishes it under `name` for later bins.
struct extent_def {
    std::string field;
    std::string name;
};

struct bin_def {
    std::string field;
    std::optional<numeric_param> step;
    std::optional<numeric_param> maxbins;
    // Explicit [lo, hi], the name of an extent output, or computed from the input rows.
    std::variant<std::monostate, std::array<double, 2>, std::string> extent;
    std::array<std::string, 2> as{"bin_start", "bin_end"};
};

struct aggregate_def {
    std::vector<std::string> groupby;
    std::vector<aggregate_op> ops;
    std::vector<std::optional<std::string>> fields;
    std::vector<std::string> as;
};

struct collect_def {
    std::vector<std::string> fields;
    std::vector<bool> descending;
};

struct transform_def {
    spec_path origin;
    std::variant<filter_def, formula_def, extent_def, bin_def, aggregate_def, collect_def> params;

    transform_kind kind() const noexcept { return static_cast<transform_kind>(params.index()); }
};

struct dataset_def {
    enum class origin_kind { inline_values, url, derived };

    std::string name;
    spec_path origin;
    origin_kind source_kind = origin_kind::inline_values;
    spec_node values;       // inline_values: array of objects
    std::string url;        // url
    std::string source;     // derived: upstream dataset name
    std::vector<transform_def> transforms;
};

struct signal_def {
    std::string name;
    spec_path origin;
    scalar value;
};

struct data_field_ref {
    std::string data;
    std::string field;
};

enum class range_keyword { width, height };

struct scale_def {
    std::string name;
    spec_path origin;
    scale_type type = scale_type::linear;
    std::variant<std::vector<scalar>, data_field_ref> domain;
    std::variant<std::vector<scalar>, range_keyword> range;
    double padding = 0.1;
};

struct channel_def {
    enum class form { value, field, scaled_field, scaled_value, band, signal };

    form kind = form::value;
    scalar value;
    std::string field;
    std::string scale;
    double band = 1.0;
    std::string signal;
};

struct encode_group {
    std::string name; // "enter" or "update"
    spec_path origin;
    std::vector<std::pair<channel, channel_def>> channels;
};

struct mark_def {
    mark_type type = mark_type::symbol;
    std::string from;
    spec_path origin;
    std::vector<encode_group> groups;
};

struct axis_def {
    std::string scale;
    axis_orient orient = axis_orient::bottom;
    spec_path origin;
};

struct chart_spec {
    double width = 400;
    double height = 300;
    std::vector<dataset_def> datasets;
    std::vector<signal_def> signals;
    std::vector<scale_def> scales;
    std::vector<mark_def> marks;
    std::vector<axis_def> axes;

    // Dataset indices ordered so every source precedes its dependents, ties in spec order.
    std::vector<std::size_t> dataset_order;

    const dataset_def* find_dataset(std::string_view name) const;
    const signal_def* find_signal(std::string_view name) const;
    const scale_def* find_scale(std::string_view name) const;
};

// Structural validation and reference resolution. Expressions are not parsed here.
// Throws validation_error carrying the offending path and span.
chart_spec validate(const spec_document& doc);

} // namespace flowlens
