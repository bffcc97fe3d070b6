#include "flowlens/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "flowlens/errors.hpp"

namespace flowlens::expr {

class parser {
public:
    parser(std::string_view text, const std::optional<spec_path>& origin) : text_(text), origin_(origin) {
        prog_.source_ = std::string(text);
    }

    program run() {
        skip_ws();
        prog_.root_ = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return std::move(prog_);
    }

private:
    std::string_view text_;
    const std::optional<spec_path>& origin_;
    std::size_t pos_ = 0;
    program prog_;
    int depth_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw expression_error("expression \"" + std::string(text_) + "\": " + msg + " at offset " +
                                   std::to_string(pos_),
                               origin_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_, tok.size()) != tok)
            return false;
        pos_ += tok.size();
        return true;
    }

    std::uint32_t add(node n) {
        prog_.nodes_.push_back(std::move(n));
        return static_cast<std::uint32_t>(prog_.nodes_.size() - 1);
    }

    std::uint32_t binary(op k, std::uint32_t a, std::uint32_t b) { return add({k, a, b, 0, {}}); }

    std::uint32_t parse_expr() {
        if (++depth_ > 256)
            fail("expression nested too deeply");
        auto cond = parse_or();
        if (accept("?")) {
            auto then = parse_expr();
            if (!accept(":"))
                fail("expected ':'");
            auto otherwise = parse_expr();
            cond = add({op::conditional, cond, then, otherwise, {}});
        }
        --depth_;
        return cond;
    }

    std::uint32_t parse_or() {
        auto lhs = parse_and();
        while (accept("||"))
            lhs = binary(op::logical_or, lhs, parse_and());
        return lhs;
    }

    std::uint32_t parse_and() {
        auto lhs = parse_equality();
        while (accept("&&"))
            lhs = binary(op::logical_and, lhs, parse_equality());
        return lhs;
    }

    std::uint32_t parse_equality() {
        auto lhs = parse_relational();
        while (true) {
            if (accept("===") || accept("=="))
                lhs = binary(op::eq, lhs, parse_relational());
            else if (accept("!==") || accept("!="))
                lhs = binary(op::ne, lhs, parse_relational());
            else
                return lhs;
        }
    }

    std::uint32_t parse_relational() {
        auto lhs = parse_additive();
        while (true) {
            if (accept("<="))
                lhs = binary(op::le, lhs, parse_additive());
            else if (accept(">="))
                lhs = binary(op::ge, lhs, parse_additive());
            else if (accept("<"))
                lhs = binary(op::lt, lhs, parse_additive());
            else if (accept(">"))
                lhs = binary(op::gt, lhs, parse_additive());
            else
                return lhs;
        }
    }

    std::uint32_t parse_additive() {
        auto lhs = parse_multiplicative();
        while (true) {
            if (accept("+"))
                lhs = binary(op::add, lhs, parse_multiplicative());
            else if (accept("-"))
                lhs = binary(op::sub, lhs, parse_multiplicative());
            else
                return lhs;
        }
    }

    std::uint32_t parse_multiplicative() {
        auto lhs = parse_unary();
        while (true) {
            if (accept("*"))
                lhs = binary(op::mul, lhs, parse_unary());
            else if (accept("/"))
                lhs = binary(op::div, lhs, parse_unary());
            else if (accept("%"))
                lhs = binary(op::mod, lhs, parse_unary());
            else
                return lhs;
        }
    }

    std::uint32_t parse_unary() {
        skip_ws();
        // "!=" is handled by the equality level, so a lone '!' here is negation.
        if (pos_ < text_.size() && text_[pos_] == '!' && text_.substr(pos_, 2) != "!=") {
            ++pos_;
            return add({op::logical_not, parse_unary(), 0, 0, {}});
        }
        if (accept("-"))
            return add({op::negate, parse_unary(), 0, 0, {}});
        return parse_primary();
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
    static bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

    std::string parse_identifier() {
        auto start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_]))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string parse_string_literal() {
        char quote = text_[pos_++];
        std::string out;
        while (true) {
            if (pos_ >= text_.size())
                fail("unterminated string");
            char c = text_[pos_++];
            if (c == quote)
                return out;
            if (c == '\\') {
                if (pos_ >= text_.size())
                    fail("unterminated string");
                char e = text_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += e;
                }
                continue;
            }
            out += c;
        }
    }

    std::uint32_t slot(std::vector<std::string>& names, const std::string& name) {
        auto it = std::find(names.begin(), names.end(), name);
        if (it != names.end())
            return static_cast<std::uint32_t>(it - names.begin());
        names.push_back(name);
        return static_cast<std::uint32_t>(names.size() - 1);
    }

    std::uint32_t parse_primary() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            if (!accept(")"))
                fail("expected ')'");
            return inner;
        }
        if (c == '"' || c == '\'')
            return add({op::literal, 0, 0, 0, scalar(parse_string_literal())});
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            auto start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
                ++pos_;
                if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                    ++pos_;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            }
            double v = 0;
            auto sv = text_.substr(start, pos_ - start);
            auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
            if (ec != std::errc() || ptr != sv.data() + sv.size()) {
                pos_ = start;
                fail("malformed number");
            }
            return add({op::literal, 0, 0, 0, scalar(v)});
        }
        if (ident_start(c)) {
            auto start = pos_;
            auto name = parse_identifier();
            if (name == "true")
                return add({op::literal, 0, 0, 0, scalar(true)});
            if (name == "false")
                return add({op::literal, 0, 0, 0, scalar(false)});
            if (name == "null")
                return add({op::literal, 0, 0, 0, scalar()});
            if (name == "datum") {
                skip_ws();
                std::string field;
                if (accept(".")) {
                    skip_ws();
                    if (pos_ >= text_.size() || !ident_start(text_[pos_]))
                        fail("expected field name after 'datum.'");
                    field = parse_identifier();
                } else if (accept("[")) {
                    skip_ws();
                    if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
                        fail("expected quoted field name");
                    field = parse_string_literal();
                    if (!accept("]"))
                        fail("expected ']'");
                } else {
                    fail("expected '.' or '[' after datum");
                }
                return add({op::field, slot(prog_.fields_, field), 0, 0, {}});
            }
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                pos_ = start;
                fail("function calls are not supported");
            }
            return add({op::signal, slot(prog_.signals_, name), 0, 0, {}});
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

program compile(std::string_view text, const std::optional<spec_path>& origin) { return parser(text, origin).run(); }

namespace {

const char* symbol(op k) {
    switch (k) {
    case op::add: return "+";
    case op::sub: return "-";
    case op::mul: return "*";
    case op::div: return "/";
    case op::mod: return "%";
    case op::lt: return "<";
    case op::le: return "<=";
    case op::gt: return ">";
    case op::ge: return ">=";
    case op::negate: return "unary -";
    default: return "?";
    }
}

[[noreturn]] void type_failure(op k, const scalar& a, const scalar& b) {
    throw evaluation_failure(std::string("cannot apply '") + symbol(k) + "' to " + a.type_name() + " and " +
                             b.type_name());
}

scalar arithmetic(op k, const scalar& a, const scalar& b) {
    if (a.is_number() && b.is_number()) {
        double x = a.as_number(), y = b.as_number();
        switch (k) {
        case op::add: return x + y;
        case op::sub: return x - y;
        case op::mul: return x * y;
        case op::div: return y == 0.0 ? scalar() : scalar(x / y);
        case op::mod: return y == 0.0 ? scalar() : scalar(std::fmod(x, y));
        default: break;
        }
    }
    if ((a.is_null() || a.is_number()) && (b.is_null() || b.is_number()))
        return {};
    type_failure(k, a, b);
}

scalar ordering(op k, const scalar& a, const scalar& b) {
    if (a.is_null() || b.is_null())
        return false;
    int cmp = 0;
    if (a.is_number() && b.is_number()) {
        double x = a.as_number(), y = b.as_number();
        if (std::isnan(x) || std::isnan(y))
            return false;
        cmp = x < y ? -1 : (x > y ? 1 : 0);
    } else if (a.is_string() && b.is_string()) {
        cmp = a.as_string().compare(b.as_string());
    } else {
        type_failure(k, a, b);
    }
    switch (k) {
    case op::lt: return cmp < 0;
    case op::le: return cmp <= 0;
    case op::gt: return cmp > 0;
    default: return cmp >= 0;
    }
}

scalar eval_node(const program& p, std::uint32_t i, const context& ctx) {
    const auto& n = p.nodes()[i];
    switch (n.kind) {
    case op::literal: return n.value;
    case op::field: {
        auto col = n.a < ctx.field_slots.size() ? ctx.field_slots[n.a] : -1;
        if (col < 0 || static_cast<std::size_t>(col) >= ctx.row.size())
            return {};
        return ctx.row[static_cast<std::size_t>(col)];
    }
    case op::signal: return n.a < ctx.signal_values.size() ? ctx.signal_values[n.a] : scalar();
    case op::negate: {
        auto v = eval_node(p, n.a, ctx);
        if (v.is_number())
            return -v.as_number();
        if (v.is_null())
            return {};
        throw evaluation_failure(std::string("cannot negate ") + v.type_name());
    }
    case op::logical_not: return !eval_node(p, n.a, ctx).truthy();
    case op::logical_and: {
        auto a = eval_node(p, n.a, ctx);
        return a.truthy() ? eval_node(p, n.b, ctx) : a;
    }
    case op::logical_or: {
        auto a = eval_node(p, n.a, ctx);
        return a.truthy() ? a : eval_node(p, n.b, ctx);
    }
    case op::conditional: return eval_node(p, n.a, ctx).truthy() ? eval_node(p, n.b, ctx) : eval_node(p, n.c, ctx);
    case op::eq: return eval_node(p, n.a, ctx) == eval_node(p, n.b, ctx);
    case op::ne: return !(eval_node(p, n.a, ctx) == eval_node(p, n.b, ctx));
    case op::lt:
    case op::le:
    case op::gt:
    case op::ge: return ordering(n.kind, eval_node(p, n.a, ctx), eval_node(p, n.b, ctx));
    default: return arithmetic(n.kind, eval_node(p, n.a, ctx), eval_node(p, n.b, ctx));
    }
}

} // namespace

scalar evaluate(const program& p, const context& ctx) { return eval_node(p, p.root(), ctx); }

} // namespace flowlens::expr
