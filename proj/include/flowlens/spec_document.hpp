#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowlens/spec_path.hpp"
#include "flowlens/spec_span.hpp"

namespace flowlens {

struct spec_member;

// A parsed JSON value together with the span of text it came from.
struct spec_node {
    enum class kind { null, boolean, number, string, array, object };

    kind type = kind::null;
    bool boolean = false;
    double number = 0.0;
    std::string string;
    std::vector<spec_node> items;     // arrays
    std::vector<spec_member> members; // objects, in source order
    spec_span span;

    bool is_null() const noexcept { return type == kind::null; }
    bool is_bool() const noexcept { return type == kind::boolean; }
    bool is_number() const noexcept { return type == kind::number; }
    bool is_string() const noexcept { return type == kind::string; }
    bool is_array() const noexcept { return type == kind::array; }
    bool is_object() const noexcept { return type == kind::object; }

    // Object member lookup; nullptr when absent or when this is not an object.
    const spec_node* find(std::string_view key) const;
    const spec_member* find_member(std::string_view key) const;

    // Structural equality of values; spans are ignored.
    bool same_value(const spec_node& other) const;
};

struct spec_member {
    std::string key;
    spec_span key_span;
    spec_node value;
};

const char* kind_name(spec_node::kind k) noexcept;

// Immutable span-annotated parse of a chart specification.
class spec_document {
public:
    spec_document(std::string source, spec_node root) : source_(std::move(source)), root_(std::move(root)) {}

    const std::string& source_text() const noexcept { return source_; }
    const spec_node& root() const noexcept { return root_; }

    // nullptr if the path does not resolve.
    const spec_node* resolve(const spec_path& path) const noexcept;
    std::string_view text_of(const spec_span& span) const;

private:
    std::string source_;
    spec_node root_;
};

// Strict JSON (no comments, no trailing commas, no duplicate keys).
// Throws syntax_error carrying the line and column of the first offending token.
spec_document parse_spec(std::string text);

// Parses one standalone JSON value; spans are relative to `text`.
spec_node parse_json_value(std::string_view text);

// Span of the addressed node including its delimiters. Throws path_not_found.
spec_span span_of(const spec_document& doc, const spec_path& path);

// Compact JSON rendering of a value (keys in source order, shortest round-trip numbers).
std::string to_compact_json(const spec_node& node);

} // namespace flowlens
