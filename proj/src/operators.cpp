#include "flowlens/operators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <numeric>

namespace flowlens::ops {

namespace {

bool numeric_range(const std::vector<scalar>& r) { return r.size() >= 2 && r[0].is_number() && r[1].is_number(); }

struct row_hash {
    std::size_t operator()(const row& r) const noexcept {
        std::size_t h = r.size();
        for (const auto& v : r) {
            std::size_t x = 0;
            if (v.is_number())
                x = std::hash<double>{}(v.as_number() == 0 ? 0.0 : v.as_number());
            else if (v.is_string())
                x = std::hash<std::string>{}(v.as_string());
            else if (v.is_bool())
                x = v.as_bool() ? 0x9e37 : 0x7f4a;
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace

void scale_value::index_categories() {
    lookup.resize(categories.size());
    std::iota(lookup.begin(), lookup.end(), 0);
    std::stable_sort(lookup.begin(), lookup.end(),
                     [&](std::size_t a, std::size_t b) { return categories[a] < categories[b]; });
}

std::optional<std::size_t> scale_value::category_index(const scalar& v) const {
    auto it = std::lower_bound(lookup.begin(), lookup.end(), v,
                               [&](std::size_t i, const scalar& x) { return categories[i] < x; });
    if (it == lookup.end() || !(categories[*it] == v))
        return std::nullopt;
    return *it;
}

scalar scale_value::apply(const scalar& v) const {
    switch (type) {
    case scale_type::linear: {
        if (!v.is_number() || range.size() < 2)
            return {};
        double t = domain_hi == domain_lo ? 0.5 : (v.as_number() - domain_lo) / (domain_hi - domain_lo);
        if (numeric_range(range)) {
            double r0 = range[0].as_number(), r1 = range[1].as_number();
            return r0 + t * (r1 - r0);
        }
        return interpolate_color(range[0].as_string(), range[1].as_string(), std::clamp(t, 0.0, 1.0));
    }
    case scale_type::band: {
        auto i = category_index(v);
        if (!i || !numeric_range(range))
            return {};
        auto n = static_cast<double>(categories.size());
        double r0 = range[0].as_number(), r1 = range[1].as_number();
        double span = r1 - r0;
        double step = span / std::max(1.0, n - padding + 2 * padding);
        double start = r0 + (span - step * (n - padding)) * 0.5;
        return start + step * static_cast<double>(*i);
    }
    case scale_type::ordinal: {
        auto i = category_index(v);
        if (!i || range.empty())
            return {};
        return range[*i % range.size()];
    }
    }
    return {};
}

double scale_value::bandwidth() const {
    if (type != scale_type::band || categories.empty() || !numeric_range(range))
        return 0;
    auto n = static_cast<double>(categories.size());
    double span = range[1].as_number() - range[0].as_number();
    double step = span / std::max(1.0, n - padding + 2 * padding);
    return step * (1 - padding);
}

std::array<double, 2> scale_value::pixel_range() const {
    if (!numeric_range(range))
        return {0, 0};
    return {range.front().as_number(), range.back().as_number()};
}

std::vector<std::int32_t> bind_fields(const expr::program& prog, const table& t) {
    std::vector<std::int32_t> slots;
    slots.reserve(prog.fields().size());
    for (const auto& f : prog.fields()) {
        auto idx = t.field_index(f);
        slots.push_back(idx ? static_cast<std::int32_t>(*idx) : -1);
    }
    return slots;
}

table filter_rows(const table& in, const expr::program& prog, std::span<const scalar> signals) {
    auto slots = bind_fields(prog, in);
    table out;
    out.fields = in.fields;
    for (const auto& r : in.rows)
        if (expr::evaluate(prog, {r, slots, signals}).truthy())
            out.rows.push_back(r);
    return out;
}

table add_formula(const table& in, const expr::program& prog, std::span<const scalar> signals,
                  const std::string& as) {
    auto slots = bind_fields(prog, in);
    table out;
    out.fields = in.fields;
    auto existing = in.field_index(as);
    if (!existing)
        out.fields.push_back(as);
    std::size_t col = existing.value_or(in.fields.size());
    out.rows.reserve(in.rows.size());
    for (const auto& r : in.rows) {
        auto v = expr::evaluate(prog, {r, slots, signals});
        row next;
        next.reserve(out.fields.size());
        next.assign(r.begin(), r.end());
        if (existing)
            next[col] = std::move(v);
        else
            next.push_back(std::move(v));
        out.rows.push_back(std::move(next));
    }
    return out;
}

extent_value compute_extent(const table& in, const std::string& field) {
    extent_value out;
    auto idx = in.field_index(field);
    if (!idx)
        return out;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool any = false;
    for (const auto& r : in.rows) {
        const auto& v = r[*idx];
        if (!v.is_number())
            continue;
        lo = std::min(lo, v.as_number());
        hi = std::max(hi, v.as_number());
        any = true;
    }
    if (any)
        out.range = std::array<double, 2>{lo, hi};
    return out;
}

double nice_bin_step(double span, double maxbins) {
    maxbins = std::max(1.0, std::floor(maxbins));
    if (!(span > 0) || !std::isfinite(span))
        return 1.0;
    int k = static_cast<int>(std::floor(std::log10(span / maxbins))) - 1;
    for (;; ++k) {
        for (double m : {1.0, 2.0, 5.0}) {
            double step = m * std::pow(10.0, k);
            if (std::ceil(span / step) <= maxbins)
                return step;
        }
    }
}

table bin_rows(const table& in, const std::string& field, double step, double lo, double hi,
               const std::array<std::string, 2>& as) {
    table out;
    out.fields = in.fields;
    std::array<std::size_t, 2> cols{};
    for (int k = 0; k < 2; ++k) {
        auto idx = std::find(out.fields.begin(), out.fields.end(), as[k]);
        cols[k] = static_cast<std::size_t>(idx - out.fields.begin());
        if (idx == out.fields.end())
            out.fields.push_back(as[k]);
    }
    auto src = in.field_index(field);
    double nbins = std::max(1.0, std::ceil((hi - lo) / step));
    out.rows.reserve(in.rows.size());
    for (const auto& r : in.rows) {
        row next;
        next.reserve(out.fields.size());
        next.assign(r.begin(), r.end());
        next.resize(out.fields.size());
        const scalar* v = src ? &r[*src] : nullptr;
        if (v && v->is_number()) {
            double k = std::clamp(std::floor((v->as_number() - lo) / step), 0.0, nbins - 1);
            double start = lo + k * step;
            next[cols[0]] = start;
            next[cols[1]] = start + step;
        } else {
            next[cols[0]] = scalar();
            next[cols[1]] = scalar();
        }
        out.rows.push_back(std::move(next));
    }
    return out;
}

table aggregate_rows(const table& in, const std::vector<std::string>& groupby, const std::vector<aggregate_op>& ops,
                     const std::vector<std::optional<std::string>>& fields, const std::vector<std::string>& as) {
    struct acc {
        double count = 0, sum = 0, numeric = 0;
        double min = std::numeric_limits<double>::infinity();
        double max = -std::numeric_limits<double>::infinity();
    };
    std::vector<std::optional<std::size_t>> key_cols, value_cols;
    for (const auto& g : groupby)
        key_cols.push_back(in.field_index(g));
    for (const auto& f : fields)
        value_cols.push_back(f ? in.field_index(*f) : std::nullopt);

    std::unordered_map<row, std::size_t, row_hash> group_index;
    std::vector<row> keys;
    std::vector<std::vector<acc>> accs;
    row key(key_cols.size());
    for (const auto& r : in.rows) {
        for (std::size_t k = 0; k < key_cols.size(); ++k)
            key[k] = key_cols[k] ? r[*key_cols[k]] : scalar();
        auto it = group_index.find(key);
        if (it == group_index.end()) {
            it = group_index.emplace(key, keys.size()).first;
            keys.push_back(key);
            accs.emplace_back(ops.size());
        }
        auto& a = accs[it->second];
        for (std::size_t o = 0; o < ops.size(); ++o) {
            a[o].count += 1;
            if (!value_cols[o])
                continue;
            const auto& v = r[*value_cols[o]];
            if (!v.is_number())
                continue;
            double x = v.as_number();
            a[o].numeric += 1;
            a[o].sum += x;
            a[o].min = std::min(a[o].min, x);
            a[o].max = std::max(a[o].max, x);
        }
    }

    table out;
    out.fields = groupby;
    out.fields.insert(out.fields.end(), as.begin(), as.end());
    out.rows.reserve(keys.size());
    for (std::size_t g = 0; g < keys.size(); ++g) {
        row r = keys[g];
        for (std::size_t o = 0; o < ops.size(); ++o) {
            const auto& a = accs[g][o];
            switch (ops[o]) {
            case aggregate_op::count: r.emplace_back(a.count); break;
            case aggregate_op::sum: r.emplace_back(a.sum); break;
            case aggregate_op::mean: r.push_back(a.numeric > 0 ? scalar(a.sum / a.numeric) : scalar()); break;
            case aggregate_op::min: r.push_back(a.numeric > 0 ? scalar(a.min) : scalar()); break;
            case aggregate_op::max: r.push_back(a.numeric > 0 ? scalar(a.max) : scalar()); break;
            }
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

table sort_rows(const table& in, const std::vector<std::string>& fields, const std::vector<bool>& descending) {
    std::vector<std::optional<std::size_t>> cols;
    for (const auto& f : fields)
        cols.push_back(in.field_index(f));
    std::vector<std::size_t> order(in.rows.size());
    std::iota(order.begin(), order.end(), 0);
    static const scalar null_value;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto& x = cols[k] ? in.rows[a][*cols[k]] : null_value;
            const auto& y = cols[k] ? in.rows[b][*cols[k]] : null_value;
            if (x == y)
                continue;
            return descending[k] ? y < x : x < y;
        }
        return false;
    });
    table out;
    out.fields = in.fields;
    out.rows.reserve(order.size());
    for (auto i : order)
        out.rows.push_back(in.rows[i]);
    return out;
}

domain_value compute_domain(const table& in, const std::string& field, scale_type type) {
    domain_value out;
    if (type == scale_type::linear) {
        out.numeric = compute_extent(in, field).range;
        return out;
    }
    auto idx = in.field_index(field);
    if (!idx)
        return out;
    for (const auto& r : in.rows)
        if (!r[*idx].is_null())
            out.categories.push_back(r[*idx]);
    std::sort(out.categories.begin(), out.categories.end());
    out.categories.erase(std::unique(out.categories.begin(), out.categories.end()), out.categories.end());
    return out;
}

double tick_step(double lo, double hi, int count) {
    double step0 = std::abs(hi - lo) / std::max(1, count);
    if (!(step0 > 0) || !std::isfinite(step0))
        return 0;
    double power = std::floor(std::log10(step0));
    double error = step0 / std::pow(10.0, power);
    double factor = error >= std::sqrt(50.0) ? 10 : error >= std::sqrt(10.0) ? 5 : error >= std::sqrt(2.0) ? 2 : 1;
    return factor * std::pow(10.0, power);
}

namespace {

std::string fixed(double v, int decimals) {
    if (v == 0.0)
        v = 0.0; // drop negative zero
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, ptr);
}

} // namespace

tick_list axis_ticks(const scale_value& scale, axis_orient orient, int count) {
    tick_list out;
    out.orient = orient;
    out.range = scale.pixel_range();
    if (scale.type == scale_type::linear) {
        double lo = std::min(scale.domain_lo, scale.domain_hi), hi = std::max(scale.domain_lo, scale.domain_hi);
        double step = tick_step(lo, hi, count);
        if (step == 0) {
            out.ticks.push_back({scale.apply(lo).is_number() ? scale.apply(lo).as_number() : 0, format_number(lo)});
            return out;
        }
        int decimals = step >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
        // Integer multiples avoid accumulating rounding error.
        double inv = step < 1 ? std::round(1 / step) : 0;
        auto first = static_cast<long long>(std::ceil(step < 1 ? lo * inv : lo / step));
        auto last = static_cast<long long>(std::floor(step < 1 ? hi * inv : hi / step));
        for (auto i = first; i <= last; ++i) {
            double v = step < 1 ? static_cast<double>(i) / inv : static_cast<double>(i) * step;
            out.ticks.push_back({scale.apply(v).as_number(), fixed(v, decimals)});
        }
        return out;
    }
    double offset = scale.type == scale_type::band ? scale.bandwidth() / 2 : 0;
    for (const auto& c : scale.categories) {
        auto pos = scale.apply(c);
        if (pos.is_number())
            out.ticks.push_back({pos.as_number() + offset, c.to_display()});
    }
    return out;
}

std::string interpolate_color(const std::string& a, const std::string& b, double t) {
    auto channel = [](const std::string& c, int i) { return std::stoi(c.substr(1 + 2 * i, 2), nullptr, 16); };
    static const char* hex = "0123456789abcdef";
    std::string out = "#";
    for (int i = 0; i < 3; ++i) {
        double x = channel(a, i) + t * (channel(b, i) - channel(a, i));
        int v = std::clamp(static_cast<int>(std::lround(x)), 0, 255);
        out += hex[v >> 4];
        out += hex[v & 15];
    }
    return out;
}

} // namespace flowlens::ops
