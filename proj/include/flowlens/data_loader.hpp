#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "flowlens/spec_document.hpp"
#include "flowlens/value.hpp"

namespace flowlens {

// RFC 4180 CSV with a header row. Column types are inferred per column: a column whose
// non-empty cells all parse as numbers becomes numeric, all "true"/"false" becomes boolean,
// anything else stays string. Empty cells read as null.
// Throws std::invalid_argument on malformed quoting.
table parse_csv(std::string_view text);

// JSON array of flat objects; fields are the union of keys in first-appearance order.
// Throws std::invalid_argument on malformed input or nested values.
table parse_json_records(std::string_view text);

// Inline "values" array from a spec.
table table_from_values(const spec_node& values);

// Chooses the format by extension (.csv / .json). Throws data_load_error naming `origin`.
table load_table(const std::filesystem::path& file, const spec_path& origin);

} // namespace flowlens
