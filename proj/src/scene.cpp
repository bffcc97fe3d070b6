#include "flowlens/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

namespace flowlens {

namespace {

constexpr const char* default_color = "#4c78a8";
constexpr const char* axis_color = "#888888";
constexpr const char* label_color = "#000000";

void escape_into(std::string& out, std::string_view s) {
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
}

void attr(std::string& out, const char* name, double v) {
    out += ' ';
    out += name;
    out += "=\"";
    out += format_fixed3(v);
    out += '"';
}

void attr(std::string& out, const char* name, std::string_view v) {
    out += ' ';
    out += name;
    out += "=\"";
    escape_into(out, v);
    out += '"';
}

void style(std::string& out, const scene_item& it) {
    if (!it.fill.empty())
        attr(out, "fill", it.fill);
    if (!it.stroke.empty())
        attr(out, "stroke", it.stroke);
    if (it.opacity)
        attr(out, "opacity", *it.opacity);
}

void item_svg(std::string& out, const scene_item& it) {
    using shape = scene_item::shape;
    switch (it.kind) {
    case shape::circle:
        out += "<circle";
        attr(out, "cx", it.x);
        attr(out, "cy", it.y);
        attr(out, "r", it.r);
        style(out, it);
        out += "/>";
        break;
    case shape::rect:
        out += "<rect";
        attr(out, "x", it.x);
        attr(out, "y", it.y);
        attr(out, "width", it.width);
        attr(out, "height", it.height);
        style(out, it);
        out += "/>";
        break;
    case shape::path:
        out += "<path";
        attr(out, "d", it.d);
        style(out, it);
        out += "/>";
        break;
    case shape::line:
        out += "<line";
        attr(out, "x1", it.x);
        attr(out, "y1", it.y);
        attr(out, "x2", it.x2);
        attr(out, "y2", it.y2);
        style(out, it);
        out += "/>";
        break;
    case shape::text:
        out += "<text";
        attr(out, "x", it.x);
        attr(out, "y", it.y);
        if (!it.anchor.empty())
            attr(out, "text-anchor", it.anchor);
        style(out, it);
        out += '>';
        escape_into(out, it.text);
        out += "</text>";
        break;
    }
    out += '\n';
}

// Resolves one axis of a rect from a start, an end and a size channel.
std::pair<double, double> rect_extent(const ops::encoded_item& it, channel start, channel end, channel size) {
    double a = it.has(start) ? it.get(start) : 0;
    double lo = a, len = 0;
    if (it.has(start) && it.has(end)) {
        lo = std::min(a, it.get(end));
        len = std::abs(it.get(end) - a);
    } else if (it.has(size)) {
        len = it.get(size);
        lo = it.has(start) ? a : it.has(end) ? it.get(end) - len : 0;
    }
    if (len < 0) {
        lo += len;
        len = -len;
    }
    return {lo, len};
}

void apply_style(scene_item& s, const ops::encoded_item& it, const char* default_fill) {
    s.fill = it.has(channel::fill) ? it.fill : default_fill;
    if (it.has(channel::stroke))
        s.stroke = it.stroke;
    if (it.has(channel::opacity))
        s.opacity = it.get(channel::opacity);
}

} // namespace

std::string format_fixed3(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    std::string s(buf, ptr);
    if (s == "-0.000")
        s = "0.000";
    return s;
}

ops::encoded_items merge_encodes(const std::vector<const ops::encoded_items*>& groups) {
    if (groups.empty())
        return {};
    ops::encoded_items out = *groups.front();
    for (std::size_t g = 1; g < groups.size(); ++g) {
        const auto& items = groups[g]->items;
        for (std::size_t i = 0; i < std::min(items.size(), out.items.size()); ++i) {
            auto& dst = out.items[i];
            const auto& src = items[i];
            for (std::size_t c = 0; c < channel_count; ++c) {
                if (!(src.set & (1u << c)))
                    continue;
                dst.set |= static_cast<std::uint16_t>(1u << c);
                auto ch = static_cast<channel>(c);
                if (c < ops::encoded_item::numeric_channels)
                    dst.num[c] = src.num[c];
                else if (ch == channel::fill)
                    dst.fill = src.fill;
                else if (ch == channel::stroke)
                    dst.stroke = src.stroke;
                else
                    dst.text = src.text;
            }
        }
    }
    return out;
}

scene_layer render_mark(mark_type type, std::size_t index, const spec_path& origin, const ops::encoded_items& items) {
    scene_layer layer{"mark", to_string(type), index, origin, {}, {}};
    auto& out = layer.items;
    switch (type) {
    case mark_type::symbol:
        out.reserve(items.items.size());
        for (const auto& it : items.items) {
            scene_item s;
            s.kind = scene_item::shape::circle;
            s.row = it.row;
            s.x = it.has(channel::x) ? it.get(channel::x) : 0;
            s.y = it.has(channel::y) ? it.get(channel::y) : 0;
            double size = it.has(channel::size) ? std::max(0.0, it.get(channel::size)) : 64;
            s.r = std::sqrt(size / std::numbers::pi);
            apply_style(s, it, default_color);
            out.push_back(std::move(s));
        }
        break;
    case mark_type::rect:
        out.reserve(items.items.size());
        for (const auto& it : items.items) {
            scene_item s;
            s.kind = scene_item::shape::rect;
            s.row = it.row;
            std::tie(s.x, s.width) = rect_extent(it, channel::x, channel::x2, channel::width);
            std::tie(s.y, s.height) = rect_extent(it, channel::y, channel::y2, channel::height);
            apply_style(s, it, default_color);
            out.push_back(std::move(s));
        }
        break;
    case mark_type::line: {
        scene_item s;
        s.kind = scene_item::shape::path;
        for (const auto& it : items.items) {
            if (!it.has(channel::x) || !it.has(channel::y))
                continue;
            s.d += s.d.empty() ? "M" : "L";
            s.d += format_fixed3(it.get(channel::x));
            s.d += ',';
            s.d += format_fixed3(it.get(channel::y));
        }
        if (s.d.empty())
            break;
        s.fill = "none";
        const auto& first = items.items.front();
        s.stroke = first.has(channel::stroke) ? first.stroke : default_color;
        if (first.has(channel::opacity))
            s.opacity = first.get(channel::opacity);
        out.push_back(std::move(s));
        break;
    }
    case mark_type::text:
        out.reserve(items.items.size());
        for (const auto& it : items.items) {
            scene_item s;
            s.kind = scene_item::shape::text;
            s.row = it.row;
            s.x = it.has(channel::x) ? it.get(channel::x) : 0;
            s.y = it.has(channel::y) ? it.get(channel::y) : 0;
            s.text = it.text;
            apply_style(s, it, label_color);
            out.push_back(std::move(s));
        }
        break;
    }
    layer.markup = layer_svg(layer);
    return layer;
}

scene_layer render_axis(const ops::tick_list& ticks, std::size_t index, const spec_path& origin, double width,
                        double height) {
    scene_layer layer{"axis", to_string(ticks.orient), index, origin, {}, {}};
    bool horizontal = ticks.orient == axis_orient::bottom || ticks.orient == axis_orient::top;
    double base = 0, dir = 1;
    switch (ticks.orient) {
    case axis_orient::bottom: base = height; dir = 1; break;
    case axis_orient::top: base = 0; dir = -1; break;
    case axis_orient::left: base = 0; dir = -1; break;
    case axis_orient::right: base = width; dir = 1; break;
    }
    auto line = [&](double along0, double across0, double along1, double across1) {
        scene_item s;
        s.kind = scene_item::shape::line;
        s.x = horizontal ? along0 : across0;
        s.y = horizontal ? across0 : along0;
        s.x2 = horizontal ? along1 : across1;
        s.y2 = horizontal ? across1 : along1;
        s.stroke = axis_color;
        layer.items.push_back(std::move(s));
    };
    line(ticks.range[0], base, ticks.range[1], base);
    for (const auto& t : ticks.ticks) {
        line(t.position, base, t.position, base + 5 * dir);
        scene_item label;
        label.kind = scene_item::shape::text;
        label.text = t.label;
        label.fill = label_color;
        if (horizontal) {
            label.x = t.position;
            label.y = dir > 0 ? base + 15 : base - 7;
            label.anchor = "middle";
        } else {
            label.x = base + 7 * dir;
            label.y = t.position + 3;
            label.anchor = dir > 0 ? "start" : "end";
        }
        layer.items.push_back(std::move(label));
    }
    layer.markup = layer_svg(layer);
    return layer;
}

std::string layer_svg(const scene_layer& layer) {
    std::string out = "<g class=\"" + layer.role + "-" + layer.type + "\">\n";
    for (const auto& it : layer.items)
        item_svg(out, it);
    out += "</g>\n";
    return out;
}

std::string scene_to_svg(const scene_graph& scene) {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"";
    attr(out, "width", scene.width);
    attr(out, "height", scene.height);
    out += ">\n";
    for (const auto& layer : scene.layers)
        out += layer.markup.empty() ? layer_svg(layer) : layer.markup;
    out += "</svg>\n";
    return out;
}

} // namespace flowlens
