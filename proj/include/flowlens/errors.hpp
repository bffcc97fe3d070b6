#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "flowlens/spec_path.hpp"
#include "flowlens/spec_span.hpp"

namespace flowlens {

// Base of every error the pipeline reports. Errors that can be pinned to a spec
// component carry its path, and a span when one was known at the throw site.
class error : public std::runtime_error {
public:
    error(const std::string& message, std::optional<spec_path> path = {}, std::optional<spec_span> span = {})
        : std::runtime_error(message), path_(std::move(path)), span_(span) {}

    virtual const char* kind() const noexcept { return "error"; }

    const std::optional<spec_path>& path() const noexcept { return path_; }
    const std::optional<spec_span>& span() const noexcept { return span_; }

private:
    std::optional<spec_path> path_;
    std::optional<spec_span> span_;
};

class syntax_error : public error {
public:
    syntax_error(const std::string& message, std::size_t line, std::size_t col, std::size_t byte)
        : error(message + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line_(line), col_(col), byte_(byte) {}

    const char* kind() const noexcept override { return "SyntaxError"; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return col_; }
    std::size_t byte_offset() const noexcept { return byte_; }

private:
    std::size_t line_, col_, byte_;
};

#define FLOWLENS_ERROR_KIND(name, label)                                                     \
    class name : public error {                                                              \
    public:                                                                                  \
        using error::error;                                                                  \
        const char* kind() const noexcept override { return label; }                        \
    };

FLOWLENS_ERROR_KIND(validation_error, "ValidationError")
FLOWLENS_ERROR_KIND(path_not_found, "PathNotFound")
FLOWLENS_ERROR_KIND(expression_error, "ExpressionError")
FLOWLENS_ERROR_KIND(lowering_error, "LoweringError")
FLOWLENS_ERROR_KIND(unknown_node, "UnknownNode")
FLOWLENS_ERROR_KIND(data_load_error, "DataLoadError")
FLOWLENS_ERROR_KIND(unknown_signal, "UnknownSignal")
FLOWLENS_ERROR_KIND(unknown_pulse, "UnknownPulse")
FLOWLENS_ERROR_KIND(schema_error, "SchemaError")

#undef FLOWLENS_ERROR_KIND

class eval_error : public error {
public:
    eval_error(const std::string& message, std::size_t node, std::optional<spec_path> path = {})
        : error(message, std::move(path)), node_(node) {}

    const char* kind() const noexcept override { return "EvalError"; }
    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

} // namespace flowlens
