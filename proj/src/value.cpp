#include "flowlens/value.hpp"

#include <charconv>
#include <cmath>

namespace flowlens {

bool scalar::truthy() const noexcept {
    if (is_null())
        return false;
    if (is_bool())
        return as_bool();
    if (is_number()) {
        double d = as_number();
        return d != 0.0 && !std::isnan(d);
    }
    return !as_string().empty();
}

std::string format_number(double v) {
    if (std::isnan(v))
        return "NaN";
    if (std::isinf(v))
        return v > 0 ? "Infinity" : "-Infinity";
    if (v == 0.0)
        return "0";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string scalar::to_display() const {
    if (is_null())
        return "null";
    if (is_bool())
        return as_bool() ? "true" : "false";
    if (is_number())
        return format_number(as_number());
    return as_string();
}

const char* scalar::type_name() const noexcept {
    if (is_null())
        return "null";
    if (is_bool())
        return "boolean";
    if (is_number())
        return "number";
    return "string";
}

std::optional<std::size_t> table::field_index(std::string_view name) const {
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] == name)
            return i;
    return std::nullopt;
}

std::size_t table::ensure_field(const std::string& name) {
    if (auto idx = field_index(name))
        return *idx;
    fields.push_back(name);
    for (auto& r : rows)
        r.emplace_back();
    return fields.size() - 1;
}

} // namespace flowlens
