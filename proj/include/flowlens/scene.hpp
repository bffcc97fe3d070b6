#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flowlens/chart_spec.hpp"
#include "flowlens/operators.hpp"
#include "flowlens/spec_path.hpp"

namespace flowlens {

struct scene_item {
    enum class shape { circle, rect, path, line, text };

    shape kind = shape::rect;
    std::size_t row = 0; // source row; 0 for paths and axis parts
    double x = 0, y = 0, x2 = 0, y2 = 0; // line endpoints use x2 / y2
    double width = 0, height = 0, r = 0;
    std::optional<double> opacity;
    std::string fill, stroke, text, d, anchor;

    friend bool operator==(const scene_item&, const scene_item&) = default;
};

struct scene_layer {
    std::string role; // "mark" or "axis"
    std::string type; // mark type or axis orient
    std::size_t index = 0;
    spec_path origin;
    std::vector<scene_item> items;
    std::string markup; // SVG group produced by the Render operator

    friend bool operator==(const scene_layer&, const scene_layer&) = default;
};

struct scene_graph {
    double width = 0, height = 0;
    std::vector<scene_layer> layers;
    friend bool operator==(const scene_graph&, const scene_graph&) = default;
};

// Later encode groups override earlier ones channel by channel.
ops::encoded_items merge_encodes(const std::vector<const ops::encoded_items*>& groups);

scene_layer render_mark(mark_type type, std::size_t index, const spec_path& origin, const ops::encoded_items& items);
scene_layer render_axis(const ops::tick_list& ticks, std::size_t index, const spec_path& origin, double width,
                        double height);

// <g> element for one layer.
std::string layer_svg(const scene_layer& layer);

// Deterministic SVG 1.1; numbers use 3 fixed decimals.
std::string scene_to_svg(const scene_graph& scene);

std::string format_fixed3(double v);

} // namespace flowlens
