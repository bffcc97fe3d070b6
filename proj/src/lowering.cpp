#include "flowlens/lowering.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <set>

#include "flowlens/errors.hpp"
#include "flowlens/expression.hpp"

namespace flowlens {

namespace {
constexpr std::array<const char*, 14> kind_names{"Source", "Copy",        "Filter", "Formula",    "Extent",
                                                 "Bin",    "Aggregate",   "Collect", "Signal",    "ScaleDomain",
                                                 "Scale",  "Encode",      "AxisTicks", "Render"};
}

const char* to_string(node_kind k) noexcept { return kind_names[static_cast<std::size_t>(k)]; }

std::optional<node_kind> parse_node_kind(std::string_view s) {
    for (std::size_t i = 0; i < kind_names.size(); ++i)
        if (s == kind_names[i])
            return static_cast<node_kind>(i);
    return std::nullopt;
}

std::vector<node_id> dataflow_desc::inputs_of(node_id n) const {
    std::vector<node_id> out;
    for (const auto& [from, to] : edges)
        if (to == n)
            out.push_back(from);
    return out;
}

std::vector<node_id> dataflow_desc::outputs_of(node_id n) const {
    std::vector<node_id> out;
    for (const auto& [from, to] : edges)
        if (from == n)
            out.push_back(to);
    return out;
}

std::vector<node_id> topological_order(std::size_t node_count, const std::vector<std::pair<node_id, node_id>>& edges) {
    std::vector<std::vector<node_id>> out(node_count);
    std::vector<std::size_t> indegree(node_count, 0);
    for (const auto& [from, to] : edges) {
        out[from].push_back(to);
        ++indegree[to];
    }
    std::priority_queue<node_id, std::vector<node_id>, std::greater<>> ready;
    for (node_id n = 0; n < node_count; ++n)
        if (indegree[n] == 0)
            ready.push(n);
    std::vector<node_id> order;
    order.reserve(node_count);
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(n);
        for (auto m : out[n])
            if (--indegree[m] == 0)
                ready.push(m);
    }
    if (order.size() != node_count)
        throw lowering_error("dataflow graph has a cycle");
    return order;
}

std::vector<node_id> reachable_from(std::size_t node_count, const std::vector<std::pair<node_id, node_id>>& edges,
                                    node_id start) {
    std::vector<std::vector<node_id>> out(node_count);
    for (const auto& [from, to] : edges)
        out[from].push_back(to);
    std::vector<bool> seen(node_count, false);
    std::vector<node_id> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        for (auto m : out[n]) {
            if (!seen[m]) {
                seen[m] = true;
                stack.push_back(m);
            }
        }
    }
    std::vector<node_id> result;
    for (node_id n = 0; n < node_count; ++n)
        if (seen[n])
            result.push_back(n);
    return result;
}

void profiling_map::record(const spec_path& path, node_id node) {
    forward_[path].push_back(node);
    backward_[node] = path;
}

std::vector<node_id> nodes_for_path(const profiling_map& map, const spec_path& path, bool include_descendants) {
    const auto& fwd = map.forward();
    if (!include_descendants) {
        auto it = fwd.find(path);
        return it == fwd.end() ? std::vector<node_id>{} : it->second;
    }
    // Extensions of a path sort contiguously right after it.
    std::vector<node_id> out;
    for (auto it = fwd.lower_bound(path); it != fwd.end() && path.is_prefix_of(it->first); ++it)
        out.insert(out.end(), it->second.begin(), it->second.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const spec_path& path_for_node(const profiling_map& map, node_id node) {
    auto it = map.backward().find(node);
    if (it == map.backward().end())
        throw unknown_node("unknown dataflow node " + std::to_string(node));
    return it->second;
}

namespace {

class lowerer {
public:
    explicit lowerer(const chart_spec& chart) : chart_(chart) {}

    lowered_chart run() {
        for (auto i : chart_.dataset_order)
            lower_dataset(chart_.datasets[i], i);
        for (const auto& s : chart_.signals) {
            auto id = add(node_kind::signal, json{{"name", s.name}, {"value", to_json(s.value)}}, s.origin, {});
            signal_nodes_[s.name] = id;
        }
        patch_signal_refs();
        for (const auto& s : chart_.scales)
            lower_scale(s);
        for (std::size_t i = 0; i < chart_.marks.size(); ++i)
            lower_mark(chart_.marks[i], i);
        for (std::size_t i = 0; i < chart_.axes.size(); ++i)
            lower_axis(chart_.axes[i], i);
        return std::move(out_);
    }

private:
    struct pending_ref {
        node_id consumer;
        std::string signal;
        json::json_pointer slot;
    };

    const chart_spec& chart_;
    lowered_chart out_;
    std::set<std::pair<node_id, node_id>> edge_set_;
    std::map<std::string, node_id> dataset_output_;
    std::map<std::string, node_id> extent_nodes_;
    std::map<std::string, node_id> signal_nodes_;
    std::map<std::string, node_id> scale_nodes_;
    std::vector<pending_ref> pending_;

    node_id add(node_kind kind, json params, const spec_path& origin, std::initializer_list<node_id> inputs) {
        node_id id = out_.desc.nodes.size();
        out_.desc.nodes.push_back({id, kind, std::move(params), origin});
        out_.map.record(origin, id);
        for (auto in : inputs)
            edge(in, id);
        return id;
    }

    void edge(node_id from, node_id to) {
        if (edge_set_.insert({from, to}).second)
            out_.desc.edges.emplace_back(from, to);
    }

    json& params(node_id n) { return out_.desc.nodes[n].params; }

    // Records a signal dependency; the signal's node id is filled in once signals are lowered.
    void signal_ref(node_id consumer, const std::string& name, const json::json_pointer& slot) {
        if (auto it = signal_nodes_.find(name); it != signal_nodes_.end()) {
            params(consumer)[slot] = it->second;
            edge(it->second, consumer);
            return;
        }
        params(consumer)[slot] = nullptr;
        pending_.push_back({consumer, name, slot});
    }

    void patch_signal_refs() {
        for (const auto& p : pending_) {
            auto id = signal_nodes_.at(p.signal);
            params(p.consumer)[p.slot] = id;
            edge(id, p.consumer);
        }
        pending_.clear();
    }

    void check_expression(const std::string& text, const spec_path& path, node_id consumer) {
        auto prog = expr::compile(text, path);
        for (const auto& s : prog.signals()) {
            if (!chart_.find_signal(s))
                throw expression_error("expression \"" + text + "\": unknown signal \"" + s + "\"", path);
            signal_ref(consumer, s, json::json_pointer("/signals/" + s));
        }
    }

    json numeric_param_json(const numeric_param& p) {
        if (const auto* d = std::get_if<double>(&p))
            return *d;
        return json{{"signal", std::get<flowlens::signal_ref>(p).name}, {"node", nullptr}};
    }

    void lower_dataset(const dataset_def& d, std::size_t index) {
        node_id current = 0;
        switch (d.source_kind) {
        case dataset_def::origin_kind::inline_values:
            current = add(node_kind::source,
                          json{{"dataset", d.name}, {"dataset_index", index}, {"format", "inline"},
                               {"rows", d.values.items.size()}},
                          d.origin, {});
            break;
        case dataset_def::origin_kind::url: {
            auto dot = d.url.rfind('.');
            std::string format = dot == std::string::npos ? "" : d.url.substr(dot + 1);
            std::transform(format.begin(), format.end(), format.begin(), [](unsigned char c) { return std::tolower(c); });
            current = add(node_kind::source,
                          json{{"dataset", d.name}, {"dataset_index", index}, {"format", format}, {"url", d.url}},
                          d.origin, {});
            break;
        }
        case dataset_def::origin_kind::derived: {
            auto upstream = dataset_output_.at(d.source);
            // A derived dataset that transforms its rows gets a private copy so downstream
            // operators never touch the upstream dataset. Without transforms it aliases upstream.
            current = d.transforms.empty()
                          ? upstream
                          : add(node_kind::copy, json{{"dataset", d.name}, {"input", upstream}}, d.origin, {upstream});
            break;
        }
        }

        for (const auto& t : d.transforms) {
            switch (t.kind()) {
            case transform_kind::filter: {
                const auto& f = std::get<filter_def>(t.params);
                auto id = add(node_kind::filter, json{{"input", current}, {"expr", f.expr}, {"signals", json::object()}},
                              t.origin, {current});
                check_expression(f.expr, t.origin.child("expr"), id);
                current = id;
                break;
            }
            case transform_kind::formula: {
                const auto& f = std::get<formula_def>(t.params);
                auto id = add(node_kind::formula,
                              json{{"input", current}, {"expr", f.expr}, {"as", f.as}, {"signals", json::object()}},
                              t.origin, {current});
                check_expression(f.expr, t.origin.child("expr"), id);
                current = id;
                break;
            }
            case transform_kind::extent: {
                // Side output: the rows flow past the extent node unchanged.
                const auto& e = std::get<extent_def>(t.params);
                auto id = add(node_kind::extent, json{{"input", current}, {"field", e.field}, {"name", e.name}},
                              t.origin, {current});
                extent_nodes_[e.name] = id;
                break;
            }
            case transform_kind::bin: current = lower_bin(std::get<bin_def>(t.params), t.origin, current); break;
            case transform_kind::aggregate: {
                const auto& a = std::get<aggregate_def>(t.params);
                json ops = json::array(), fields = json::array();
                for (std::size_t i = 0; i < a.ops.size(); ++i) {
                    ops.push_back(to_string(a.ops[i]));
                    fields.push_back(a.fields[i] ? json(*a.fields[i]) : json(nullptr));
                }
                current = add(node_kind::aggregate,
                              json{{"input", current}, {"groupby", a.groupby}, {"ops", ops}, {"fields", fields}, {"as", a.as}},
                              t.origin, {current});
                break;
            }
            case transform_kind::collect: {
                const auto& c = std::get<collect_def>(t.params);
                json order = json::array();
                for (bool desc : c.descending)
                    order.push_back(desc ? "descending" : "ascending");
                current = add(node_kind::collect,
                              json{{"input", current}, {"sort", json{{"field", c.fields}, {"order", order}}}}, t.origin,
                              {current});
                break;
            }
            }
        }
        dataset_output_[d.name] = current;
    }

    node_id lower_bin(const bin_def& b, const spec_path& origin, node_id current) {
        json p{{"input", current}, {"field", b.field}, {"as", json::array({b.as[0], b.as[1]})}};
        if (b.step)
            p["step"] = numeric_param_json(*b.step);
        else
            p["maxbins"] = numeric_param_json(*b.maxbins);
        std::optional<node_id> extent_node;
        if (const auto* lit = std::get_if<std::array<double, 2>>(&b.extent)) {
            p["extent"] = json::array({(*lit)[0], (*lit)[1]});
        } else if (const auto* name = std::get_if<std::string>(&b.extent)) {
            extent_node = extent_nodes_.at(*name);
            p["extent"] = json{{"signal", *name}, {"node", *extent_node}};
        } else {
            p["extent"] = nullptr;
        }
        auto id = add(node_kind::bin, std::move(p), origin, {current});
        if (extent_node)
            edge(*extent_node, id);
        for (const char* key : {"step", "maxbins"})
            if (params(id).contains(key) && params(id)[key].is_object())
                signal_ref(id, params(id)[key]["signal"].get<std::string>(),
                           json::json_pointer(std::string("/") + key + "/node"));
        return id;
    }

    void lower_scale(const scale_def& s) {
        json range = json::array();
        if (const auto* kw = std::get_if<range_keyword>(&s.range)) {
            if (*kw == range_keyword::width)
                range = json::array({0.0, chart_.width});
            else
                range = json::array({chart_.height, 0.0});
        } else {
            for (const auto& v : std::get<std::vector<scalar>>(s.range))
                range.push_back(to_json(v));
        }
        json p{{"name", s.name}, {"type", to_string(s.type)}};
        if (const auto* ref = std::get_if<data_field_ref>(&s.domain)) {
            auto input = dataset_output_.at(ref->data);
            auto dom = add(node_kind::scale_domain,
                           json{{"input", input}, {"field", ref->field}, {"type", to_string(s.type)}}, s.origin, {input});
            p["domain"] = json{{"node", dom}};
            p["range"] = range;
            p["padding"] = s.padding;
            scale_nodes_[s.name] = add(node_kind::scale, std::move(p), s.origin, {dom});
        } else {
            json values = json::array();
            for (const auto& v : std::get<std::vector<scalar>>(s.domain))
                values.push_back(to_json(v));
            p["domain"] = values;
            p["range"] = range;
            p["padding"] = s.padding;
            // Literal domain and range: a constant scale with no inputs.
            scale_nodes_[s.name] = add(node_kind::scale, std::move(p), s.origin, {});
        }
    }

    json channel_json(const channel_def& c, std::vector<node_id>& deps) {
        static constexpr std::array<const char*, 6> forms{"value", "field", "scaled_field", "scaled_value", "band",
                                                          "signal"};
        json j{{"form", forms[static_cast<std::size_t>(c.kind)]}};
        switch (c.kind) {
        case channel_def::form::value: j["value"] = to_json(c.value); break;
        case channel_def::form::field: j["field"] = c.field; break;
        case channel_def::form::scaled_field: j["field"] = c.field; break;
        case channel_def::form::scaled_value: j["value"] = to_json(c.value); break;
        case channel_def::form::band: j["band"] = c.band; break;
        case channel_def::form::signal:
            j["signal"] = c.signal;
            j["signal_node"] = signal_nodes_.at(c.signal);
            deps.push_back(signal_nodes_.at(c.signal));
            break;
        }
        if (!c.scale.empty()) {
            auto sn = scale_nodes_.at(c.scale);
            j["scale"] = c.scale;
            j["scale_node"] = sn;
            deps.push_back(sn);
        }
        return j;
    }

    void lower_mark(const mark_def& m, std::size_t index) {
        auto data = dataset_output_.at(m.from);
        std::vector<node_id> encodes;
        for (const auto& g : m.groups) {
            std::vector<node_id> deps;
            json channels = json::object();
            for (const auto& [ch, def] : g.channels)
                channels[to_string(ch)] = channel_json(def, deps);
            // Encode nodes are attributed to the mark entry itself.
            auto id = add(node_kind::encode,
                          json{{"mark", to_string(m.type)}, {"group", g.name}, {"input", data}, {"channels", channels}},
                          m.origin, {data});
            for (auto d : deps)
                edge(d, id);
            encodes.push_back(id);
        }
        json p{{"layer", "mark"}, {"index", index}, {"mark", to_string(m.type)}, {"encodes", encodes}};
        if (encodes.empty()) {
            p["input"] = data;
            add(node_kind::render, std::move(p), m.origin, {data});
            return;
        }
        auto id = add(node_kind::render, std::move(p), m.origin, {});
        for (auto e : encodes)
            edge(e, id);
    }

    void lower_axis(const axis_def& a, std::size_t index) {
        const auto* scale = chart_.find_scale(a.scale);
        if (scale->type == scale_type::ordinal) {
            const auto* range = std::get_if<std::vector<scalar>>(&scale->range);
            if (!range || !std::all_of(range->begin(), range->end(), [](const scalar& v) { return v.is_number(); }))
                throw lowering_error("axis over ordinal scale \"" + a.scale + "\" needs a numeric range",
                                     a.origin.child("scale"));
        }
        if (scale->type == scale_type::linear) {
            const auto* range = std::get_if<std::vector<scalar>>(&scale->range);
            if (range && !(*range)[0].is_number())
                throw lowering_error("axis over color scale \"" + a.scale + "\" is not supported",
                                     a.origin.child("scale"));
        }
        auto sn = scale_nodes_.at(a.scale);
        auto ticks = add(node_kind::axis_ticks,
                         json{{"scale", sn}, {"orient", to_string(a.orient)}, {"count", 10},
                              {"width", chart_.width}, {"height", chart_.height}},
                         a.origin, {sn});
        add(node_kind::render,
            json{{"layer", "axis"}, {"index", index}, {"orient", to_string(a.orient)}, {"input", ticks},
                 {"width", chart_.width}, {"height", chart_.height}},
            a.origin, {ticks});
    }
};

} // namespace

lowered_chart lower(const chart_spec& chart) { return lowerer(chart).run(); }

} // namespace flowlens
