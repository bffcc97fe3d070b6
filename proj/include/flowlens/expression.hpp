#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowlens/spec_path.hpp"
#include "flowlens/value.hpp"

namespace flowlens::expr {

// Expression language for filter / formula transforms:
//   datum.<field>, datum["<field>"], signal names, number / string / true / false / null literals,
//   + - * / %, < <= > >= == != (=== and !== as aliases), && || !, unary -, ?:, parentheses.
//
// Arithmetic needs numbers (null propagates, x / 0 yields null); ordering comparisons need two
// numbers or two strings (null compares false); && and || return an operand, as in JavaScript.

enum class op : std::uint8_t {
    literal, field, signal,
    negate, logical_not,
    add, sub, mul, div, mod,
    lt, le, gt, ge, eq, ne,
    logical_and, logical_or, conditional
};

struct node {
    op kind = op::literal;
    std::uint32_t a = 0, b = 0, c = 0; // child indices, or field / signal slot
    scalar value;
};

class program {
public:
    const std::string& source() const noexcept { return source_; }
    const std::vector<std::string>& fields() const noexcept { return fields_; }
    const std::vector<std::string>& signals() const noexcept { return signals_; }
    const std::vector<node>& nodes() const noexcept { return nodes_; }
    std::uint32_t root() const noexcept { return root_; }

private:
    friend class parser;
    std::string source_;
    std::vector<node> nodes_;
    std::uint32_t root_ = 0;
    std::vector<std::string> fields_;
    std::vector<std::string> signals_;
};

// Parses `text`. Throws expression_error (carrying `origin`) on malformed input.
program compile(std::string_view text, const std::optional<spec_path>& origin = {});

// Raised while evaluating, e.g. arithmetic on a string.
class evaluation_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct context {
    std::span<const scalar> row;            // current datum (may be empty)
    std::span<const std::int32_t> field_slots; // program field -> row column, -1 when absent
    std::span<const scalar> signal_values;  // program signal -> value
};

scalar evaluate(const program& p, const context& ctx);

} // namespace flowlens::expr
