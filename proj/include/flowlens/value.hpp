#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flowlens {

// Scalar cell / signal value: null, boolean, number or string.
class scalar {
public:
    scalar() = default;
    scalar(std::nullptr_t) {}
    scalar(bool b) : v_(b) {}
    scalar(double d) : v_(d) {}
    scalar(int i) : v_(static_cast<double>(i)) {}
    scalar(std::string s) : v_(std::move(s)) {}
    scalar(const char* s) : v_(std::string(s)) {}

    bool is_null() const noexcept { return std::holds_alternative<std::monostate>(v_); }
    bool is_bool() const noexcept { return std::holds_alternative<bool>(v_); }
    bool is_number() const noexcept { return std::holds_alternative<double>(v_); }
    bool is_string() const noexcept { return std::holds_alternative<std::string>(v_); }

    bool as_bool() const { return std::get<bool>(v_); }
    double as_number() const { return std::get<double>(v_); }
    const std::string& as_string() const { return std::get<std::string>(v_); }

    // JS-like truthiness: null, false, 0, NaN and "" are falsy.
    bool truthy() const noexcept;

    // Display form: numbers in shortest round-trip notation, null as "null".
    std::string to_display() const;
    const char* type_name() const noexcept;

    friend bool operator==(const scalar& a, const scalar& b) { return a.v_ == b.v_; }

    // Total order: null < boolean < number < string.
    friend bool operator<(const scalar& a, const scalar& b) { return a.v_ < b.v_; }

private:
    std::variant<std::monostate, bool, double, std::string> v_;
};

std::string format_number(double v);

using row = std::vector<scalar>;

// Row-major table. All rows share the field list; a field absent from a source
// record is stored as null.
struct table {
    std::vector<std::string> fields;
    std::vector<row> rows;

    std::size_t size() const noexcept { return rows.size(); }
    std::optional<std::size_t> field_index(std::string_view name) const;

    // Index of `name`, appending a null-filled column when it does not exist.
    std::size_t ensure_field(const std::string& name);

    friend bool operator==(const table&, const table&) = default;
};

using table_ptr = std::shared_ptr<const table>;

} // namespace flowlens
