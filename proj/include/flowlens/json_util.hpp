#pragma once

#include <json.hpp>

#include "flowlens/spec_path.hpp"
#include "flowlens/spec_span.hpp"
#include "flowlens/value.hpp"

namespace flowlens {

// Insertion-ordered so serialized output keeps a stable field order.
using json = nlohmann::ordered_json;

json to_json(const scalar& v);
scalar scalar_from_json(const json& j); // throws std::invalid_argument for arrays / objects

// Paths serialize as arrays of strings (keys) and non-negative integers (indices).
json to_json(const spec_path& p);
spec_path path_from_json(const json& j); // throws std::invalid_argument

json to_json(const spec_span& s);
spec_span span_from_json(const json& j);

} // namespace flowlens
