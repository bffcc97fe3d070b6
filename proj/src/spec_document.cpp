#include "flowlens/spec_document.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

#include "flowlens/errors.hpp"

namespace flowlens {

const spec_member* spec_node::find_member(std::string_view key) const {
    if (type != kind::object)
        return nullptr;
    for (const auto& m : members)
        if (m.key == key)
            return &m;
    return nullptr;
}

const spec_node* spec_node::find(std::string_view key) const {
    const auto* m = find_member(key);
    return m ? &m->value : nullptr;
}

bool spec_node::same_value(const spec_node& other) const {
    if (type != other.type)
        return false;
    switch (type) {
    case kind::null: return true;
    case kind::boolean: return boolean == other.boolean;
    case kind::number: return number == other.number;
    case kind::string: return string == other.string;
    case kind::array:
        if (items.size() != other.items.size())
            return false;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (!items[i].same_value(other.items[i]))
                return false;
        return true;
    case kind::object:
        if (members.size() != other.members.size())
            return false;
        for (std::size_t i = 0; i < members.size(); ++i)
            if (members[i].key != other.members[i].key || !members[i].value.same_value(other.members[i].value))
                return false;
        return true;
    }
    return false;
}

const char* kind_name(spec_node::kind k) noexcept {
    switch (k) {
    case spec_node::kind::null: return "null";
    case spec_node::kind::boolean: return "boolean";
    case spec_node::kind::number: return "number";
    case spec_node::kind::string: return "string";
    case spec_node::kind::array: return "array";
    case spec_node::kind::object: return "object";
    }
    return "?";
}

const spec_node* spec_document::resolve(const spec_path& path) const noexcept {
    const spec_node* node = &root_;
    for (const auto& seg : path.segments()) {
        if (seg.is_key()) {
            node = node->find(seg.key());
        } else {
            if (!node->is_array() || seg.index() >= node->items.size())
                return nullptr;
            node = &node->items[seg.index()];
        }
        if (!node)
            return nullptr;
    }
    return node;
}

std::string_view spec_document::text_of(const spec_span& span) const {
    return std::string_view(source_).substr(span.byte_start, span.byte_end - span.byte_start);
}

namespace {

constexpr int max_depth = 512;

class parser {
public:
    explicit parser(std::string_view text) : text_(text) {}

    spec_node parse_document() {
        skip_ws();
        auto root = parse_value(0);
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing content");
        return root;
    }

private:
    struct mark {
        std::size_t pos, line, col;
    };

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;

    mark here() const { return {pos_, line_, col_}; }

    [[noreturn]] void fail(const std::string& msg) const { throw syntax_error(msg, line_, col_, pos_); }
    [[noreturn]] void fail_at(const std::string& msg, const mark& m) const {
        throw syntax_error(msg, m.line, m.col, m.pos);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void advance() {
        auto c = static_cast<unsigned char>(text_[pos_++]);
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if ((c & 0xC0) != 0x80) {
            ++col_;
        }
    }

    void skip_ws() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
                advance();
            else
                break;
        }
    }

    void expect(char c) {
        if (at_end())
            fail(std::string("unexpected end of input, expected '") + c + "'");
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        advance();
    }

    static spec_span make_span(const mark& a, const mark& b) {
        return {a.line, a.col, b.line, b.col, a.pos, b.pos};
    }

    spec_node parse_value(int depth) {
        if (depth > max_depth)
            fail("nesting too deep");
        if (at_end())
            fail("unexpected end of input");
        auto start = here();
        spec_node node;
        switch (peek()) {
        case '{': parse_object(node, depth); break;
        case '[': parse_array(node, depth); break;
        case '"':
            node.type = spec_node::kind::string;
            node.string = parse_string();
            break;
        case 't': parse_literal("true"); node.type = spec_node::kind::boolean; node.boolean = true; break;
        case 'f': parse_literal("false"); node.type = spec_node::kind::boolean; break;
        case 'n': parse_literal("null"); break;
        default:
            if (peek() == '-' || (peek() >= '0' && peek() <= '9')) {
                node.type = spec_node::kind::number;
                node.number = parse_number();
                break;
            }
            fail(std::string("unexpected character '") + peek() + "'");
        }
        node.span = make_span(start, here());
        return node;
    }

    void parse_literal(std::string_view word) {
        auto start = here();
        for (char c : word) {
            if (at_end() || peek() != c)
                fail_at("invalid literal", start);
            advance();
        }
    }

    void parse_object(spec_node& node, int depth) {
        node.type = spec_node::kind::object;
        advance(); // {
        skip_ws();
        if (!at_end() && peek() == '}') {
            advance();
            return;
        }
        while (true) {
            skip_ws();
            if (at_end())
                fail("unexpected end of input, expected object key");
            if (peek() != '"')
                fail("expected string key");
            auto key_start = here();
            spec_member member;
            member.key = parse_string();
            member.key_span = make_span(key_start, here());
            if (node.find_member(member.key))
                fail_at("duplicate key \"" + member.key + "\"", key_start);
            skip_ws();
            expect(':');
            skip_ws();
            member.value = parse_value(depth + 1);
            node.members.push_back(std::move(member));
            skip_ws();
            if (at_end())
                fail("unexpected end of input, expected ',' or '}'");
            if (peek() == ',') {
                advance();
                continue;
            }
            if (peek() == '}') {
                advance();
                return;
            }
            fail("expected ',' or '}'");
        }
    }

    void parse_array(spec_node& node, int depth) {
        node.type = spec_node::kind::array;
        advance(); // [
        skip_ws();
        if (!at_end() && peek() == ']') {
            advance();
            return;
        }
        while (true) {
            skip_ws();
            node.items.push_back(parse_value(depth + 1));
            skip_ws();
            if (at_end())
                fail("unexpected end of input, expected ',' or ']'");
            if (peek() == ',') {
                advance();
                continue;
            }
            if (peek() == ']') {
                advance();
                return;
            }
            fail("expected ',' or ']'");
        }
    }

    double parse_number() {
        auto start = here();
        auto digit = [&] { return !at_end() && peek() >= '0' && peek() <= '9'; };
        if (peek() == '-')
            advance();
        if (!digit())
            fail("expected digit");
        if (peek() == '0') {
            advance();
        } else {
            while (digit())
                advance();
        }
        if (!at_end() && peek() == '.') {
            advance();
            if (!digit())
                fail("expected digit after decimal point");
            while (digit())
                advance();
        }
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            advance();
            if (!at_end() && (peek() == '+' || peek() == '-'))
                advance();
            if (!digit())
                fail("expected exponent digits");
            while (digit())
                advance();
        }
        double value = 0.0;
        auto sv = text_.substr(start.pos, pos_ - start.pos);
        auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
        if (ec != std::errc() || ptr != sv.data() + sv.size() || !std::isfinite(value))
            fail_at("number out of range", start);
        return value;
    }

    unsigned parse_hex4() {
        unsigned v = 0;
        for (int i = 0; i < 4; ++i) {
            if (at_end())
                fail("unexpected end of input in \\u escape");
            char c = peek();
            v <<= 4;
            if (c >= '0' && c <= '9')
                v |= static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f')
                v |= static_cast<unsigned>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F')
                v |= static_cast<unsigned>(c - 'A' + 10);
            else
                fail("invalid hex digit in \\u escape");
            advance();
        }
        return v;
    }

    static void append_utf8(std::string& out, std::uint32_t cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string parse_string() {
        advance(); // opening quote
        std::string out;
        while (true) {
            if (at_end())
                fail("unterminated string");
            auto c = static_cast<unsigned char>(peek());
            if (c == '"') {
                advance();
                return out;
            }
            if (c < 0x20)
                fail("control character in string");
            if (c != '\\') {
                out += static_cast<char>(c);
                advance();
                continue;
            }
            auto esc_start = here();
            advance();
            if (at_end())
                fail("unterminated string");
            char e = peek();
            advance();
            switch (e) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case '/': out += '/'; break;
            case 'b': out += '\b'; break;
            case 'f': out += '\f'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 't': out += '\t'; break;
            case 'u': {
                std::uint32_t cp = parse_hex4();
                if (cp >= 0xD800 && cp <= 0xDBFF) {
                    if (pos_ + 1 >= text_.size() || text_[pos_] != '\\' || text_[pos_ + 1] != 'u')
                        fail_at("unpaired surrogate", esc_start);
                    advance();
                    advance();
                    std::uint32_t lo = parse_hex4();
                    if (lo < 0xDC00 || lo > 0xDFFF)
                        fail_at("invalid low surrogate", esc_start);
                    cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                    fail_at("unpaired surrogate", esc_start);
                }
                append_utf8(out, cp);
                break;
            }
            default: fail_at("invalid escape", esc_start);
            }
        }
    }
};

void write_json_string(std::string& out, const std::string& s) {
    out += '"';
    for (unsigned char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (c < 0x20) {
                static const char* hex = "0123456789abcdef";
                out += "\\u00";
                out += hex[c >> 4];
                out += hex[c & 0xF];
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    out += '"';
}

void write_compact(std::string& out, const spec_node& node) {
    switch (node.type) {
    case spec_node::kind::null: out += "null"; break;
    case spec_node::kind::boolean: out += node.boolean ? "true" : "false"; break;
    case spec_node::kind::number: {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, node.number);
        out.append(buf, ptr);
        break;
    }
    case spec_node::kind::string: write_json_string(out, node.string); break;
    case spec_node::kind::array:
        out += '[';
        for (std::size_t i = 0; i < node.items.size(); ++i) {
            if (i)
                out += ',';
            write_compact(out, node.items[i]);
        }
        out += ']';
        break;
    case spec_node::kind::object:
        out += '{';
        for (std::size_t i = 0; i < node.members.size(); ++i) {
            if (i)
                out += ',';
            write_json_string(out, node.members[i].key);
            out += ':';
            write_compact(out, node.members[i].value);
        }
        out += '}';
        break;
    }
}

} // namespace

spec_document parse_spec(std::string text) {
    auto root = parser(text).parse_document();
    return spec_document(std::move(text), std::move(root));
}

spec_node parse_json_value(std::string_view text) { return parser(text).parse_document(); }

spec_span span_of(const spec_document& doc, const spec_path& path) {
    const auto* node = doc.resolve(path);
    if (!node)
        throw path_not_found("path " + to_string(path) + " does not resolve", path);
    return node->span;
}

std::string to_compact_json(const spec_node& node) {
    std::string out;
    write_compact(out, node);
    return out;
}

} // namespace flowlens
