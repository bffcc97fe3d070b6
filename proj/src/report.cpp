#include "flowlens/report.hpp"

#include <algorithm>
#include <set>

#include "flowlens/errors.hpp"

namespace flowlens {

profile_report build_report(const spec_document& doc, const lowered_chart& lowered, const block_tree& blocks,
                            const runtime& rt) {
    profile_report r;
    r.spec_text = doc.source_text();

    std::set<spec_path> paths;
    auto add_with_ancestors = [&](spec_path p) {
        while (paths.insert(p).second && !p.empty())
            p = p.parent();
    };
    auto walk = [&](auto&& self, const block_node& b) -> void {
        add_with_ancestors(b.path);
        for (const auto& c : b.children)
            self(self, c);
    };
    walk(walk, blocks.root);
    for (const auto& n : lowered.desc.nodes)
        add_with_ancestors(n.origin);
    for (const auto& p : paths)
        r.spans.push_back({p, span_of(doc, p)});

    r.dataflow = lowered.desc;
    r.mapping = lowered.map;
    for (const auto& p : rt.pulses())
        r.pulses.push_back({p, build_icicle(p, lowered.map, blocks, lowered.desc), node_table(p, lowered.desc, lowered.map)});

    auto scene = rt.scene();
    r.svg = scene_to_svg(scene);
    for (const auto& l : scene.layers)
        r.layers.push_back({l.role, l.type, l.index, l.origin, l.items.size()});
    return r;
}

namespace {

json icicle_json(const icicle_node& n) {
    json j{{"label", n.label}, {"kind", to_string(n.type)}};
    if (n.path)
        j["path"] = to_json(*n.path);
    if (n.node)
        j["node"] = *n.node;
    j["value_ns"] = n.value_ns;
    json children = json::array();
    for (const auto& c : n.children)
        children.push_back(icicle_json(c));
    j["children"] = std::move(children);
    return j;
}

} // namespace

json report_to_json(const profile_report& r) {
    json spans = json::array();
    for (const auto& s : r.spans)
        spans.push_back({{"path", to_json(s.path)}, {"span", to_json(s.span)}});

    json nodes = json::array();
    for (const auto& n : r.dataflow.nodes)
        nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"origin", to_json(n.origin)}, {"params", n.params}});
    json edges = json::array();
    for (const auto& [from, to] : r.dataflow.edges)
        edges.push_back(json::array({from, to}));

    json forward = json::array(), backward = json::array();
    for (const auto& [path, ids] : r.mapping.forward())
        forward.push_back({{"path", to_json(path)}, {"nodes", ids}});
    for (const auto& [id, path] : r.mapping.backward())
        backward.push_back({{"node", id}, {"path", to_json(path)}});

    json pulses = json::array();
    for (const auto& pr : r.pulses) {
        const auto& p = pr.data;
        json j{{"id", p.id}};
        j["trigger"] = p.trigger ? json{{"signal", p.trigger->name}, {"value", to_json(p.trigger->value)}} : json("init");
        j["wall_total_ns"] = p.wall_total_ns;
        j["evaluated"] = p.evaluated;
        json timings = json::array();
        for (const auto& t : p.timings)
            timings.push_back({{"node", t.node}, {"duration_ns", t.duration_ns}, {"seq", t.seq}});
        j["timings"] = std::move(timings);
        json deltas = json::array();
        for (const auto& d : p.data_deltas)
            deltas.push_back({{"node", d.node}, {"rows_in", d.rows_in}, {"rows_out", d.rows_out}, {"changed", d.changed}});
        j["data_deltas"] = std::move(deltas);
        j["icicle"] = icicle_json(pr.icicle);
        json table = json::array();
        for (const auto& row : pr.table)
            table.push_back({{"node", row.node}, {"kind", to_string(row.kind)}, {"origin", to_json(row.origin)},
                             {"duration_ns", row.duration_ns}, {"share", row.share}});
        j["node_table"] = std::move(table);
        pulses.push_back(std::move(j));
    }

    json layers = json::array();
    for (const auto& l : r.layers)
        layers.push_back({{"role", l.role}, {"type", l.type}, {"index", l.index}, {"origin", to_json(l.origin)},
                          {"items", l.items}});

    return json{{"version", r.version},
                {"spec", {{"text", r.spec_text}, {"spans", std::move(spans)}}},
                {"dataflow", {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}},
                {"mapping", {{"forward", std::move(forward)}, {"backward", std::move(backward)}}},
                {"pulses", std::move(pulses)},
                {"scene", {{"svg", r.svg}, {"layers", std::move(layers)}}}};
}

std::string serialize_report(const profile_report& r) { return report_to_json(r).dump(2) + "\n"; }

namespace {

// Typed access into the report JSON; every failure names the JSON location.
class reader {
public:
    [[noreturn]] static void fail(const spec_path& loc, const std::string& msg) {
        throw schema_error("report" + loc.to_pointer() + ": " + msg, loc);
    }

    static const json& field(const json& obj, const spec_path& loc, const char* key) {
        if (!obj.is_object())
            fail(loc, "expected an object");
        auto it = obj.find(key);
        if (it == obj.end())
            fail(loc, std::string("missing \"") + key + "\"");
        return *it;
    }

    static const json& array(const json& j, const spec_path& loc) {
        if (!j.is_array())
            fail(loc, "expected an array");
        return j;
    }

    static std::string string(const json& j, const spec_path& loc) {
        if (!j.is_string())
            fail(loc, "expected a string");
        return j.get<std::string>();
    }

    static std::int64_t integer(const json& j, const spec_path& loc) {
        if (!j.is_number_integer())
            fail(loc, "expected an integer");
        return j.get<std::int64_t>();
    }

    static std::int64_t duration(const json& j, const spec_path& loc) {
        auto v = integer(j, loc);
        if (v < 0)
            fail(loc, "durations must not be negative");
        return v;
    }

    static std::size_t index(const json& j, const spec_path& loc) {
        if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
            fail(loc, "expected a non-negative integer");
        return j.get<std::size_t>();
    }

    static double number(const json& j, const spec_path& loc) {
        if (!j.is_number())
            fail(loc, "expected a number");
        return j.get<double>();
    }

    static bool boolean(const json& j, const spec_path& loc) {
        if (!j.is_boolean())
            fail(loc, "expected a boolean");
        return j.get<bool>();
    }

    static spec_path path(const json& j, const spec_path& loc) {
        try {
            return path_from_json(j);
        } catch (const std::exception& e) {
            fail(loc, std::string("bad path: ") + e.what());
        }
    }

    static scalar value(const json& j, const spec_path& loc) {
        try {
            return scalar_from_json(j);
        } catch (const std::exception&) {
            fail(loc, "expected a scalar");
        }
    }

    static spec_span span(const json& j, const spec_path& loc) {
        spec_span s;
        s.start_line = index(field(j, loc, "start_line"), loc.child("start_line"));
        s.start_col = index(field(j, loc, "start_col"), loc.child("start_col"));
        s.end_line = index(field(j, loc, "end_line"), loc.child("end_line"));
        s.end_col = index(field(j, loc, "end_col"), loc.child("end_col"));
        s.byte_start = index(field(j, loc, "byte_start"), loc.child("byte_start"));
        s.byte_end = index(field(j, loc, "byte_end"), loc.child("byte_end"));
        if (s.byte_start >= s.byte_end)
            fail(loc, "empty span");
        return s;
    }

    static node_kind kind(const json& j, const spec_path& loc) {
        auto k = parse_node_kind(string(j, loc));
        if (!k)
            fail(loc, "unknown node kind");
        return *k;
    }
};

// Generic traversal helper: calls fn(element, location) for each array element.
template <typename F>
void each(const json& arr, const spec_path& loc, F&& fn) {
    reader::array(arr, loc);
    for (std::size_t i = 0; i < arr.size(); ++i)
        fn(arr[i], loc.child(i));
}

icicle_node icicle_from_json(const json& j, const spec_path& loc) {
    using R = reader;
    icicle_node n;
    n.label = R::string(R::field(j, loc, "label"), loc.child("label"));
    auto k = parse_icicle_kind(R::string(R::field(j, loc, "kind"), loc.child("kind")));
    if (!k)
        R::fail(loc.child("kind"), "unknown icicle kind");
    n.type = *k;
    if (j.contains("path"))
        n.path = R::path(j["path"], loc.child("path"));
    if (j.contains("node"))
        n.node = R::index(j["node"], loc.child("node"));
    bool is_leaf = n.type == icicle_node::kind::leaf;
    bool is_overhead = n.type == icicle_node::kind::overhead;
    if (is_leaf != n.node.has_value())
        R::fail(loc, "node id required exactly on node leaves");
    if ((!is_leaf && !is_overhead) != n.path.has_value())
        R::fail(loc, "path required exactly on root and block entries");
    n.value_ns = R::duration(R::field(j, loc, "value_ns"), loc.child("value_ns"));
    each(R::field(j, loc, "children"), loc.child("children"),
         [&](const json& c, const spec_path& l) { n.children.push_back(icicle_from_json(c, l)); });
    return n;
}

pulse_report pulse_from_json(const json& j, const spec_path& loc) {
    using R = reader;
    pulse_report pr;
    auto& p = pr.data;
    p.id = R::index(R::field(j, loc, "id"), loc.child("id"));
    const auto& trig = R::field(j, loc, "trigger");
    if (trig.is_object()) {
        auto tl = loc.child("trigger");
        p.trigger = signal_update{R::string(R::field(trig, tl, "signal"), tl.child("signal")),
                                  R::value(R::field(trig, tl, "value"), tl.child("value"))};
    } else if (trig != "init") {
        R::fail(loc.child("trigger"), "expected \"init\" or {signal, value}");
    }
    p.wall_total_ns = R::duration(R::field(j, loc, "wall_total_ns"), loc.child("wall_total_ns"));
    each(R::field(j, loc, "evaluated"), loc.child("evaluated"),
         [&](const json& e, const spec_path& l) { p.evaluated.push_back(R::index(e, l)); });
    each(R::field(j, loc, "timings"), loc.child("timings"), [&](const json& e, const spec_path& l) {
        p.timings.push_back({R::index(R::field(e, l, "node"), l.child("node")),
                             R::duration(R::field(e, l, "duration_ns"), l.child("duration_ns")),
                             R::index(R::field(e, l, "seq"), l.child("seq"))});
    });
    each(R::field(j, loc, "data_deltas"), loc.child("data_deltas"), [&](const json& e, const spec_path& l) {
        p.data_deltas.push_back({R::index(R::field(e, l, "node"), l.child("node")),
                                 R::index(R::field(e, l, "rows_in"), l.child("rows_in")),
                                 R::index(R::field(e, l, "rows_out"), l.child("rows_out")),
                                 R::boolean(R::field(e, l, "changed"), l.child("changed"))});
    });
    pr.icicle = icicle_from_json(R::field(j, loc, "icicle"), loc.child("icicle"));
    each(R::field(j, loc, "node_table"), loc.child("node_table"), [&](const json& e, const spec_path& l) {
        pr.table.push_back({R::index(R::field(e, l, "node"), l.child("node")),
                            R::kind(R::field(e, l, "kind"), l.child("kind")),
                            R::path(R::field(e, l, "origin"), l.child("origin")),
                            R::duration(R::field(e, l, "duration_ns"), l.child("duration_ns")),
                            R::number(R::field(e, l, "share"), l.child("share"))});
    });
    return pr;
}

// Cross-reference checks: ids exist, paths are in the span table, mapping is bidirectional.
void check_consistency(const profile_report& r, const std::map<spec_path, std::vector<node_id>>& forward_in) {
    using R = reader;
    const auto n = r.dataflow.nodes.size();
    std::set<spec_path> known;
    for (const auto& s : r.spans)
        known.insert(s.path);
    auto need_node = [&](node_id id, const spec_path& loc) {
        if (id >= n)
            R::fail(loc, "unknown node " + std::to_string(id));
    };
    auto need_path = [&](const spec_path& p, const spec_path& loc) {
        if (!known.count(p))
            R::fail(loc, "path " + to_string(p) + " is not in the span table");
    };

    for (std::size_t i = 0; i < n; ++i) {
        spec_path loc{"dataflow", "nodes", i};
        if (r.dataflow.nodes[i].id != i)
            R::fail(loc.child("id"), "node ids must be dense and ordered");
        need_path(r.dataflow.nodes[i].origin, loc.child("origin"));
    }
    for (std::size_t i = 0; i < r.dataflow.edges.size(); ++i) {
        need_node(r.dataflow.edges[i].first, {"dataflow", "edges", i, 0});
        need_node(r.dataflow.edges[i].second, {"dataflow", "edges", i, 1});
    }
    if (r.mapping.backward().size() != n)
        R::fail({"mapping", "backward"}, "every node needs exactly one backward entry");
    for (const auto& [id, path] : r.mapping.backward()) {
        need_node(id, {"mapping", "backward"});
        need_path(path, {"mapping", "backward"});
        if (!(r.dataflow.nodes[id].origin == path))
            R::fail({"mapping", "backward"}, "node " + std::to_string(id) + " path differs from its origin");
    }
    if (forward_in != r.mapping.forward())
        R::fail({"mapping", "forward"}, "forward table is not the inverse of the backward table");

    for (std::size_t k = 0; k < r.pulses.size(); ++k) {
        spec_path loc{"pulses", k};
        const auto& pr = r.pulses[k];
        if (pr.data.id != k)
            R::fail(loc.child("id"), "pulse ids must be 0, 1, 2, ...");
        for (auto id : pr.data.evaluated)
            need_node(id, loc.child("evaluated"));
        for (const auto& t : pr.data.timings)
            need_node(t.node, loc.child("timings"));
        for (const auto& d : pr.data.data_deltas)
            need_node(d.node, loc.child("data_deltas"));
        for (const auto& row : pr.table) {
            need_node(row.node, loc.child("node_table"));
            need_path(row.origin, loc.child("node_table"));
        }
        auto walk = [&](auto&& self, const icicle_node& ic, const spec_path& l) -> void {
            if (ic.node)
                need_node(*ic.node, l);
            if (ic.path)
                need_path(*ic.path, l);
            for (std::size_t c = 0; c < ic.children.size(); ++c)
                self(self, ic.children[c], l.child("children").child(c));
        };
        walk(walk, pr.icicle, loc.child("icicle"));
    }
    for (std::size_t i = 0; i < r.layers.size(); ++i)
        need_path(r.layers[i].origin, {"scene", "layers", i, "origin"});
}

} // namespace

profile_report report_from_json(const json& j) {
    using R = reader;
    const spec_path root;
    profile_report r;
    const auto& version = R::field(j, root, "version");
    if (!version.is_number_integer() || version.get<int>() != report_version)
        R::fail({"version"}, "unsupported version");
    r.version = report_version;

    const spec_path sl{"spec"};
    const auto& spec = R::field(j, root, "spec");
    r.spec_text = R::string(R::field(spec, sl, "text"), sl.child("text"));
    each(R::field(spec, sl, "spans"), sl.child("spans"), [&](const json& e, const spec_path& l) {
        r.spans.push_back({R::path(R::field(e, l, "path"), l.child("path")), R::span(R::field(e, l, "span"), l.child("span"))});
    });

    const spec_path dl{"dataflow"};
    const auto& df = R::field(j, root, "dataflow");
    each(R::field(df, dl, "nodes"), dl.child("nodes"), [&](const json& e, const spec_path& l) {
        const auto& params = R::field(e, l, "params");
        if (!params.is_object())
            R::fail(l.child("params"), "expected an object");
        r.dataflow.nodes.push_back({R::index(R::field(e, l, "id"), l.child("id")),
                                    R::kind(R::field(e, l, "kind"), l.child("kind")), params,
                                    R::path(R::field(e, l, "origin"), l.child("origin"))});
    });
    each(R::field(df, dl, "edges"), dl.child("edges"), [&](const json& e, const spec_path& l) {
        if (!e.is_array() || e.size() != 2)
            R::fail(l, "expected a [from, to] pair");
        r.dataflow.edges.emplace_back(R::index(e[0], l.child(0)), R::index(e[1], l.child(1)));
    });

    const spec_path ml{"mapping"};
    const auto& mapping = R::field(j, root, "mapping");
    std::map<spec_path, std::vector<node_id>> forward;
    each(R::field(mapping, ml, "forward"), ml.child("forward"), [&](const json& e, const spec_path& l) {
        auto path = R::path(R::field(e, l, "path"), l.child("path"));
        auto& ids = forward[path];
        each(R::field(e, l, "nodes"), l.child("nodes"),
             [&](const json& id, const spec_path& il) { ids.push_back(R::index(id, il)); });
        if (ids.empty())
            R::fail(l.child("nodes"), "forward entries list at least one node");
    });
    each(R::field(mapping, ml, "backward"), ml.child("backward"), [&](const json& e, const spec_path& l) {
        auto id = R::index(R::field(e, l, "node"), l.child("node"));
        if (r.mapping.backward().count(id))
            R::fail(l.child("node"), "duplicate backward entry");
        r.mapping.record(R::path(R::field(e, l, "path"), l.child("path")), id);
    });

    each(R::field(j, root, "pulses"), {"pulses"},
         [&](const json& e, const spec_path& l) { r.pulses.push_back(pulse_from_json(e, l)); });

    const spec_path scl{"scene"};
    const auto& scene = R::field(j, root, "scene");
    r.svg = R::string(R::field(scene, scl, "svg"), scl.child("svg"));
    each(R::field(scene, scl, "layers"), scl.child("layers"), [&](const json& e, const spec_path& l) {
        r.layers.push_back({R::string(R::field(e, l, "role"), l.child("role")),
                            R::string(R::field(e, l, "type"), l.child("type")),
                            R::index(R::field(e, l, "index"), l.child("index")),
                            R::path(R::field(e, l, "origin"), l.child("origin")),
                            R::index(R::field(e, l, "items"), l.child("items"))});
    });

    check_consistency(r, forward);
    return r;
}

profile_report deserialize_report(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw schema_error(std::string("report is not valid JSON: ") + e.what(), spec_path{});
    }
    return report_from_json(j);
}

path_timing timings_for_path(const profile_report& r, std::size_t pulse_id, const spec_path& path) {
    if (pulse_id >= r.pulses.size())
        throw unknown_pulse("unknown pulse " + std::to_string(pulse_id));
    return timings_for_path(r.pulses[pulse_id].data, r.mapping, path);
}

} // namespace flowlens
