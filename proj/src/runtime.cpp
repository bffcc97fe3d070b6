#include "flowlens/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "flowlens/data_loader.hpp"
#include "flowlens/errors.hpp"
#include "flowlens/expression.hpp"

namespace flowlens {

bool outputs_equal(const operator_output& a, const operator_output& b) {
    if (a.index() != b.index())
        return false;
    if (const auto* ta = std::get_if<table_ptr>(&a)) {
        const auto& tb = std::get<table_ptr>(b);
        return *ta == tb || (*ta && tb && **ta == *tb);
    }
    return a == b;
}

std::size_t cardinality(const operator_output& out) {
    return std::visit(
        [](const auto& v) -> std::size_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, table_ptr>)
                return v ? v->size() : 0;
            else if constexpr (std::is_same_v<T, ops::encoded_items> || std::is_same_v<T, scene_layer>)
                return v.items.size();
            else if constexpr (std::is_same_v<T, ops::tick_list>)
                return v.ticks.size();
            else if constexpr (std::is_same_v<T, ops::domain_value>)
                return v.categories.size();
            else
                return 0;
        },
        out);
}

namespace {

using clock = std::chrono::steady_clock;

node_id id_of(const json& j) { return j.get<node_id>(); }

const table& table_at(const std::vector<operator_output>& outputs, node_id n) {
    const auto& p = std::get<table_ptr>(outputs[n]);
    return *p;
}

const scalar& scalar_at(const std::vector<operator_output>& outputs, node_id n) {
    return std::get<scalar>(outputs[n]);
}

// Literal number or the value of a Signal node.
struct number_source {
    std::optional<double> literal;
    node_id node = 0;

    static number_source from(const json& j) {
        if (j.is_number())
            return {j.get<double>(), 0};
        return {std::nullopt, id_of(j.at("node"))};
    }

    double get(const std::vector<operator_output>& outputs, const char* what) const {
        if (literal)
            return *literal;
        const auto& v = scalar_at(outputs, node);
        if (!v.is_number() || !std::isfinite(v.as_number()) || v.as_number() <= 0)
            throw expr::evaluation_failure(std::string(what) + " signal must be a positive number, got " +
                                           v.to_display());
        return v.as_number();
    }
};

struct compiled_expression {
    std::shared_ptr<const expr::program> prog;
    std::vector<node_id> signal_nodes; // per program signal

    compiled_expression(const json& params, const spec_path& origin) {
        auto p = expr::compile(params.at("expr").get<std::string>(), origin.child("expr"));
        for (const auto& s : p.signals())
            signal_nodes.push_back(id_of(params.at("signals").at(s)));
        prog = std::make_shared<const expr::program>(std::move(p));
    }

    std::vector<scalar> signals(const std::vector<operator_output>& outputs) const {
        std::vector<scalar> out;
        out.reserve(signal_nodes.size());
        for (auto n : signal_nodes)
            out.push_back(scalar_at(outputs, n));
        return out;
    }
};

struct channel_spec {
    channel ch = channel::x;
    std::string form;
    scalar value;
    std::string field;
    double band = 1;
    std::optional<node_id> signal_node;
    std::optional<node_id> scale_node;
};

ops::encoded_items encode_rows(const table& in, const std::vector<channel_spec>& channels,
                               const std::vector<operator_output>& outputs) {
    struct bound {
        const channel_spec* spec;
        std::optional<std::size_t> column;
        const ops::scale_value* scale;
        scalar fixed;
    };
    std::vector<bound> bs;
    for (const auto& c : channels) {
        bound b{&c, std::nullopt, nullptr, c.value};
        if (!c.field.empty())
            b.column = in.field_index(c.field);
        if (c.scale_node)
            b.scale = &std::get<ops::scale_value>(outputs[*c.scale_node]);
        if (c.signal_node)
            b.fixed = scalar_at(outputs, *c.signal_node);
        if (c.form == "band")
            b.fixed = b.scale ? b.scale->bandwidth() * c.band : 0.0;
        else if (b.scale && !b.column && c.form != "field")
            b.fixed = b.scale->apply(b.fixed); // row-independent
        bs.push_back(std::move(b));
    }

    ops::encoded_items out;
    out.items.resize(in.rows.size());
    static const scalar null_value;
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
        auto& item = out.items[r];
        item.row = r;
        for (const auto& b : bs) {
            scalar v;
            if (b.spec->form == "field" || b.spec->form == "scaled_field") {
                const auto& cell = b.column ? in.rows[r][*b.column] : null_value;
                v = b.scale ? b.scale->apply(cell) : cell;
            } else {
                v = b.fixed;
            }
            auto c = static_cast<std::size_t>(b.spec->ch);
            if (c < ops::encoded_item::numeric_channels) {
                if (!v.is_number() || !std::isfinite(v.as_number()))
                    continue;
                item.num[c] = v.as_number();
            } else if (b.spec->ch == channel::text) {
                if (v.is_null())
                    continue;
                item.text = v.is_string() ? v.as_string() : v.to_display();
            } else {
                if (!v.is_string())
                    continue;
                (b.spec->ch == channel::fill ? item.fill : item.stroke) = v.as_string();
            }
            item.set |= static_cast<std::uint16_t>(1u << c);
        }
    }
    return out;
}

std::vector<scalar> scalars_of(const json& arr) {
    std::vector<scalar> out;
    for (const auto& v : arr)
        out.push_back(scalar_from_json(v));
    return out;
}

} // namespace

runtime::runtime(dataflow_desc desc, const chart_spec& chart, const std::filesystem::path& data_dir)
    : desc_(std::move(desc)), width_(chart.width), height_(chart.height) {
    order_ = topological_order(desc_.nodes.size(), desc_.edges);
    rank_.resize(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i)
        rank_[order_[i]] = i;
    outputs_.resize(desc_.nodes.size());

    for (const auto& s : chart.signals)
        signal_values_[s.name] = s.value;

    for (const auto& nd : desc_.nodes) {
        operator_instance op{nd.id, nd.kind, nd.origin, {}, {}};
        const json& p = nd.params;
        if (p.contains("input"))
            op.data_inputs.push_back(id_of(p["input"]));

        switch (nd.kind) {
        case node_kind::source: {
            table t;
            if (p.at("format") == "inline")
                t = table_from_values(chart.datasets.at(p.at("dataset_index").get<std::size_t>()).values);
            else
                t = load_table(data_dir / p.at("url").get<std::string>(), nd.origin.child("url"));
            auto data = std::make_shared<const table>(std::move(t));
            op.fn = [data](const auto&) -> operator_output { return table_ptr(data); };
            break;
        }
        case node_kind::copy: {
            auto in = id_of(p.at("input"));
            op.fn = [in](const auto& outs) -> operator_output {
                return table_ptr(std::make_shared<const table>(table_at(outs, in)));
            };
            break;
        }
        case node_kind::filter: {
            auto in = id_of(p.at("input"));
            compiled_expression ce(p, nd.origin);
            op.fn = [in, ce](const auto& outs) -> operator_output {
                auto sig = ce.signals(outs);
                return table_ptr(std::make_shared<const table>(ops::filter_rows(table_at(outs, in), *ce.prog, sig)));
            };
            break;
        }
        case node_kind::formula: {
            auto in = id_of(p.at("input"));
            compiled_expression ce(p, nd.origin);
            auto as = p.at("as").get<std::string>();
            op.fn = [in, ce, as](const auto& outs) -> operator_output {
                auto sig = ce.signals(outs);
                return table_ptr(
                    std::make_shared<const table>(ops::add_formula(table_at(outs, in), *ce.prog, sig, as)));
            };
            break;
        }
        case node_kind::extent: {
            auto in = id_of(p.at("input"));
            auto field = p.at("field").get<std::string>();
            op.fn = [in, field](const auto& outs) -> operator_output {
                return ops::compute_extent(table_at(outs, in), field);
            };
            break;
        }
        case node_kind::bin: {
            auto in = id_of(p.at("input"));
            auto field = p.at("field").get<std::string>();
            std::array<std::string, 2> as{p.at("as")[0].get<std::string>(), p.at("as")[1].get<std::string>()};
            bool by_step = p.contains("step");
            auto amount = number_source::from(by_step ? p["step"] : p.at("maxbins"));
            std::optional<std::array<double, 2>> fixed_extent;
            std::optional<node_id> extent_node;
            const auto& e = p.at("extent");
            if (e.is_array())
                fixed_extent = std::array<double, 2>{e[0].get<double>(), e[1].get<double>()};
            else if (e.is_object())
                extent_node = id_of(e.at("node"));
            op.fn = [=](const auto& outs) -> operator_output {
                const auto& t = table_at(outs, in);
                std::optional<std::array<double, 2>> range = fixed_extent;
                if (extent_node)
                    range = std::get<ops::extent_value>(outs[*extent_node]).range;
                else if (!range)
                    range = ops::compute_extent(t, field).range;
                auto [lo, hi] = range.value_or(std::array<double, 2>{0, 0});
                double step = by_step ? amount.get(outs, "bin step")
                                      : ops::nice_bin_step(hi - lo, amount.get(outs, "bin maxbins"));
                return table_ptr(std::make_shared<const table>(ops::bin_rows(t, field, step, lo, hi, as)));
            };
            break;
        }
        case node_kind::aggregate: {
            auto in = id_of(p.at("input"));
            auto groupby = p.at("groupby").get<std::vector<std::string>>();
            std::vector<aggregate_op> aops;
            for (const auto& o : p.at("ops"))
                aops.push_back(parse_aggregate_op(o.get<std::string>()).value());
            std::vector<std::optional<std::string>> fields;
            for (const auto& f : p.at("fields"))
                fields.push_back(f.is_null() ? std::nullopt : std::optional<std::string>(f.get<std::string>()));
            auto as = p.at("as").get<std::vector<std::string>>();
            op.fn = [=](const auto& outs) -> operator_output {
                return table_ptr(
                    std::make_shared<const table>(ops::aggregate_rows(table_at(outs, in), groupby, aops, fields, as)));
            };
            break;
        }
        case node_kind::collect: {
            auto in = id_of(p.at("input"));
            auto fields = p.at("sort").at("field").get<std::vector<std::string>>();
            std::vector<bool> desc_order;
            for (const auto& o : p.at("sort").at("order"))
                desc_order.push_back(o == "descending");
            op.fn = [=](const auto& outs) -> operator_output {
                return table_ptr(std::make_shared<const table>(ops::sort_rows(table_at(outs, in), fields, desc_order)));
            };
            break;
        }
        case node_kind::signal: {
            auto name = p.at("name").get<std::string>();
            signal_nodes_[name] = nd.id;
            op.fn = [this, name](const auto&) -> operator_output { return signal_values_.at(name); };
            break;
        }
        case node_kind::scale_domain: {
            auto in = id_of(p.at("input"));
            auto field = p.at("field").get<std::string>();
            auto type = parse_scale_type(p.at("type").get<std::string>()).value();
            op.fn = [=](const auto& outs) -> operator_output {
                return ops::compute_domain(table_at(outs, in), field, type);
            };
            break;
        }
        case node_kind::scale: {
            ops::scale_value base;
            base.name = p.at("name").get<std::string>();
            base.type = parse_scale_type(p.at("type").get<std::string>()).value();
            base.range = scalars_of(p.at("range"));
            base.padding = p.at("padding").get<double>();
            std::optional<node_id> domain_node;
            const auto& d = p.at("domain");
            if (d.is_object()) {
                domain_node = id_of(d.at("node"));
            } else if (base.type == scale_type::linear) {
                auto values = scalars_of(d);
                base.domain_lo = values.at(0).as_number();
                base.domain_hi = values.at(1).as_number();
            } else {
                base.categories = scalars_of(d);
            }
            op.fn = [base, domain_node](const auto& outs) -> operator_output {
                auto s = base;
                if (domain_node) {
                    const auto& dom = std::get<ops::domain_value>(outs[*domain_node]);
                    if (s.type == scale_type::linear) {
                        auto r = dom.numeric.value_or(std::array<double, 2>{0, 0});
                        s.domain_lo = r[0];
                        s.domain_hi = r[1];
                    } else {
                        s.categories = dom.categories;
                    }
                }
                s.index_categories();
                return s;
            };
            break;
        }
        case node_kind::encode: {
            auto in = id_of(p.at("input"));
            std::vector<channel_spec> channels;
            for (const auto& [key, c] : p.at("channels").items()) {
                channel_spec cs;
                cs.ch = parse_channel(key).value();
                cs.form = c.at("form").get<std::string>();
                if (c.contains("value"))
                    cs.value = scalar_from_json(c["value"]);
                if (c.contains("field"))
                    cs.field = c["field"].get<std::string>();
                if (c.contains("band"))
                    cs.band = c["band"].get<double>();
                if (c.contains("signal_node"))
                    cs.signal_node = id_of(c["signal_node"]);
                if (c.contains("scale_node"))
                    cs.scale_node = id_of(c["scale_node"]);
                channels.push_back(std::move(cs));
            }
            op.fn = [in, channels](const auto& outs) -> operator_output {
                return encode_rows(table_at(outs, in), channels, outs);
            };
            break;
        }
        case node_kind::axis_ticks: {
            auto scale = id_of(p.at("scale"));
            auto orient = parse_axis_orient(p.at("orient").get<std::string>()).value();
            int count = p.at("count").get<int>();
            op.fn = [=](const auto& outs) -> operator_output {
                return ops::axis_ticks(std::get<ops::scale_value>(outs[scale]), orient, count);
            };
            break;
        }
        case node_kind::render: {
            auto index = p.at("index").get<std::size_t>();
            auto origin = nd.origin;
            if (p.at("layer") == "axis") {
                auto in = id_of(p.at("input"));
                double w = p.at("width").get<double>(), h = p.at("height").get<double>();
                op.fn = [=](const auto& outs) -> operator_output {
                    return render_axis(std::get<ops::tick_list>(outs[in]), index, origin, w, h);
                };
                break;
            }
            auto type = parse_mark_type(p.at("mark").get<std::string>()).value();
            auto encodes = p.at("encodes").get<std::vector<node_id>>();
            op.data_inputs.insert(op.data_inputs.end(), encodes.begin(), encodes.end());
            std::optional<node_id> input;
            if (p.contains("input"))
                input = id_of(p["input"]);
            op.fn = [=](const auto& outs) -> operator_output {
                if (input) {
                    ops::encoded_items bare;
                    bare.items.resize(table_at(outs, *input).size());
                    for (std::size_t i = 0; i < bare.items.size(); ++i)
                        bare.items[i].row = i;
                    return render_mark(type, index, origin, bare);
                }
                std::vector<const ops::encoded_items*> groups;
                for (auto e : encodes)
                    groups.push_back(&std::get<ops::encoded_items>(outs[e]));
                return render_mark(type, index, origin, merge_encodes(groups));
            };
            break;
        }
        }
        ops_.push_back(std::move(op));
    }
}

void runtime::set_initial_signal(const std::string& name, const scalar& value) {
    if (!pulses_.empty())
        throw std::logic_error("signal overrides must precede the initial pulse");
    auto it = signal_values_.find(name);
    if (it == signal_values_.end())
        throw unknown_signal("unknown signal \"" + name + "\"");
    it->second = value;
}

const pulse& runtime::run_initial() {
    if (!pulses_.empty())
        throw std::logic_error("initial pulse already ran");
    std::vector<node_id> all(desc_.nodes.size());
    for (node_id n = 0; n < all.size(); ++n)
        all[n] = n;
    return evaluate(std::move(all), std::nullopt);
}

const pulse& runtime::apply_signal(const signal_update& u) {
    if (pulses_.empty())
        throw std::logic_error("signal update before the initial pulse");
    auto node = signal_nodes_.find(u.name);
    if (node == signal_nodes_.end())
        throw unknown_signal("unknown signal \"" + u.name + "\"");
    auto previous = signal_values_.at(u.name);
    signal_values_[u.name] = u.value;
    try {
        return evaluate(reachable_from(desc_.nodes.size(), desc_.edges, node->second), u);
    } catch (...) {
        signal_values_[u.name] = previous;
        throw;
    }
}

const pulse& runtime::evaluate(std::vector<node_id> dirty, std::optional<signal_update> trigger) {
    pulse p;
    p.id = pulses_.size();
    p.trigger = std::move(trigger);
    p.evaluated = dirty;
    std::sort(dirty.begin(), dirty.end(), [&](node_id a, node_id b) { return rank_[a] < rank_[b]; });

    // Outputs replaced so far, restored if an operator fails part-way.
    std::vector<std::pair<node_id, operator_output>> replaced;
    replaced.reserve(dirty.size());

    auto wall_start = clock::now();
    try {
        for (auto n : dirty) {
            const auto& op = ops_[n];
            operator_output out;
            auto t0 = clock::now();
            try {
                out = op.fn(outputs_);
            } catch (const std::exception& e) {
                throw eval_error(std::string(to_string(op.kind)) + " node " + std::to_string(n) + ": " + e.what(), n,
                                 op.origin);
            }
            auto t1 = clock::now();
            p.timings.push_back(
                {n, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count(), p.timings.size()});

            data_delta d{n, 0, cardinality(out), true};
            for (auto in : op.data_inputs)
                d.rows_in += cardinality(outputs_[in]);
            if (p.id > 0)
                d.changed = !outputs_equal(outputs_[n], out);
            p.data_deltas.push_back(d);

            replaced.emplace_back(n, std::move(outputs_[n]));
            outputs_[n] = std::move(out);
        }
    } catch (...) {
        for (auto& [n, old] : replaced)
            outputs_[n] = std::move(old);
        throw;
    }
    p.wall_total_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - wall_start).count();
    std::sort(p.data_deltas.begin(), p.data_deltas.end(),
              [](const data_delta& a, const data_delta& b) { return a.node < b.node; });
    pulses_.push_back(std::move(p));
    return pulses_.back();
}

scene_graph runtime::scene() const {
    scene_graph g{width_, height_, {}};
    std::vector<const scene_layer*> axes, marks;
    for (const auto& out : outputs_) {
        if (const auto* layer = std::get_if<scene_layer>(&out))
            (layer->role == "axis" ? axes : marks).push_back(layer);
    }
    auto by_index = [](const scene_layer* a, const scene_layer* b) { return a->index < b->index; };
    std::sort(axes.begin(), axes.end(), by_index);
    std::sort(marks.begin(), marks.end(), by_index);
    for (const auto* l : axes)
        g.layers.push_back(*l);
    for (const auto* l : marks)
        g.layers.push_back(*l);
    return g;
}

std::vector<signal_update> parse_events(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("event script: ") + e.what());
    }
    if (!doc.is_array())
        throw std::invalid_argument("event script must be an array");
    std::vector<signal_update> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& e = doc[i];
        if (!e.is_object() || !e.contains("signal") || !e["signal"].is_string() || !e.contains("value"))
            throw std::invalid_argument("event " + std::to_string(i) + " needs \"signal\" and \"value\"");
        out.push_back({e["signal"].get<std::string>(), scalar_from_json(e["value"])});
    }
    return out;
}

} // namespace flowlens
