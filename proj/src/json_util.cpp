#include "flowlens/json_util.hpp"

#include <stdexcept>

namespace flowlens {

json to_json(const scalar& v) {
    if (v.is_null())
        return nullptr;
    if (v.is_bool())
        return v.as_bool();
    if (v.is_number())
        return v.as_number();
    return v.as_string();
}

scalar scalar_from_json(const json& j) {
    if (j.is_null())
        return {};
    if (j.is_boolean())
        return j.get<bool>();
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
        return j.get<std::string>();
    throw std::invalid_argument("expected a scalar");
}

json to_json(const spec_path& p) {
    auto out = json::array();
    for (const auto& s : p.segments()) {
        if (s.is_key())
            out.push_back(s.key());
        else
            out.push_back(s.index());
    }
    return out;
}

spec_path path_from_json(const json& j) {
    if (!j.is_array())
        throw std::invalid_argument("path must be an array");
    std::vector<path_segment> segs;
    for (const auto& s : j) {
        if (s.is_string())
            segs.emplace_back(s.get<std::string>());
        else if (s.is_number_unsigned() || (s.is_number_integer() && s.get<long long>() >= 0))
            segs.emplace_back(s.get<std::size_t>());
        else
            throw std::invalid_argument("path segments must be strings or non-negative integers");
    }
    return spec_path(std::move(segs));
}

json to_json(const spec_span& s) {
    return json{{"start_line", s.start_line}, {"start_col", s.start_col}, {"end_line", s.end_line},
                {"end_col", s.end_col},       {"byte_start", s.byte_start}, {"byte_end", s.byte_end}};
}

spec_span span_from_json(const json& j) {
    return {j.at("start_line").get<std::size_t>(), j.at("start_col").get<std::size_t>(),
            j.at("end_line").get<std::size_t>(),   j.at("end_col").get<std::size_t>(),
            j.at("byte_start").get<std::size_t>(), j.at("byte_end").get<std::size_t>()};
}

} // namespace flowlens
