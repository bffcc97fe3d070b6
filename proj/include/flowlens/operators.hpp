#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowlens/chart_spec.hpp"
#include "flowlens/expression.hpp"
#include "flowlens/value.hpp"

// Pure operator semantics. Each function maps input values to a fresh output; the runtime
// wraps them with timing and caching.
namespace flowlens::ops {

struct extent_value {
    std::optional<std::array<double, 2>> range; // empty when the field has no numeric values
    friend bool operator==(const extent_value&, const extent_value&) = default;
};

struct domain_value {
    std::optional<std::array<double, 2>> numeric; // linear
    std::vector<scalar> categories;               // band / ordinal, ascending
    friend bool operator==(const domain_value&, const domain_value&) = default;
};

struct scale_value {
    std::string name;
    scale_type type = scale_type::linear;
    double domain_lo = 0, domain_hi = 0;
    std::vector<scalar> categories; // band / ordinal, in domain order
    std::vector<std::size_t> lookup; // category indices sorted by value; see index_categories
    std::vector<scalar> range; // two numbers, two #rrggbb colors, or the ordinal list
    double padding = 0.1;

    void index_categories();
    std::optional<std::size_t> category_index(const scalar& v) const;

    // Maps a domain value; null when it falls outside a categorical domain or is not mappable.
    scalar apply(const scalar& v) const;
    double bandwidth() const;          // band scales; 0 otherwise
    std::array<double, 2> pixel_range() const; // numeric range ends, or [0, 0]

    friend bool operator==(const scale_value&, const scale_value&) = default;
};

// Encoded channel values for one data row.
struct encoded_item {
    static constexpr std::size_t numeric_channels = 8; // x .. opacity

    std::size_t row = 0;
    std::uint16_t set = 0; // bit per channel
    std::array<double, numeric_channels> num{};
    std::string fill, stroke, text;

    bool has(channel c) const noexcept { return set & (1u << static_cast<unsigned>(c)); }
    double get(channel c) const noexcept { return num[static_cast<std::size_t>(c)]; }

    friend bool operator==(const encoded_item&, const encoded_item&) = default;
};

struct encoded_items {
    std::vector<encoded_item> items;
    friend bool operator==(const encoded_items&, const encoded_items&) = default;
};

struct tick {
    double position = 0;
    std::string label;
    friend bool operator==(const tick&, const tick&) = default;
};

struct tick_list {
    axis_orient orient = axis_orient::bottom;
    std::array<double, 2> range{};
    std::vector<tick> ticks;
    friend bool operator==(const tick_list&, const tick_list&) = default;
};

// Filter / formula helpers resolve the program's field references against the table once.
std::vector<std::int32_t> bind_fields(const expr::program& prog, const table& t);

table filter_rows(const table& in, const expr::program& prog, std::span<const scalar> signals);
table add_formula(const table& in, const expr::program& prog, std::span<const scalar> signals, const std::string& as);

// Nulls and non-numbers are ignored.
extent_value compute_extent(const table& in, const std::string& field);

// Smallest step from the 1/2/5 x 10^k ladder giving at most `maxbins` bins over `span`.
double nice_bin_step(double span, double maxbins);

// Bins are [lo + k*step, lo + (k+1)*step); k is clamped to the bins covering [lo, hi], so the
// maximum lands in the last bin. Non-numeric values get null bounds.
table bin_rows(const table& in, const std::string& field, double step, double lo, double hi,
               const std::array<std::string, 2>& as);

// One row per distinct groupby tuple, in first-appearance order. count counts rows (nulls
// included); sum / mean / min / max skip nulls and non-numbers.
table aggregate_rows(const table& in, const std::vector<std::string>& groupby, const std::vector<aggregate_op>& ops,
                     const std::vector<std::optional<std::string>>& fields, const std::vector<std::string>& as);

// Stable sort; ties keep input order.
table sort_rows(const table& in, const std::vector<std::string>& fields, const std::vector<bool>& descending);

domain_value compute_domain(const table& in, const std::string& field, scale_type type);

// Linear: d3-style nice ticks (~count); band / ordinal: one per category.
tick_list axis_ticks(const scale_value& scale, axis_orient orient, int count);

// Tick spacing from the 1/2/5 ladder for about `count` ticks over [lo, hi].
double tick_step(double lo, double hi, int count);

std::string interpolate_color(const std::string& a, const std::string& b, double t);

} // namespace flowlens::ops
