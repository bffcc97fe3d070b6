#include "flowlens/data_loader.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "flowlens/errors.hpp"

namespace flowlens {

namespace {

std::vector<std::vector<std::string>> split_csv(std::string_view text, std::vector<std::vector<bool>>& empty) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::vector<bool> record_empty;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    bool was_quoted = false;
    std::size_t i = 0;

    auto end_field = [&] {
        record_empty.push_back(!was_quoted && field.empty());
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        empty.push_back(std::move(record_empty));
        record.clear();
        record_empty.clear();
    };

    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                    throw std::invalid_argument("unexpected character after closing quote");
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        if (c == '"') {
            if (field_started)
                throw std::invalid_argument("quote inside unquoted field");
            quoted = true;
            was_quoted = true;
            field_started = true;
            ++i;
        } else if (c == ',') {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_record();
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            ++i;
        } else {
            field += c;
            field_started = true;
            ++i;
        }
    }
    if (quoted)
        throw std::invalid_argument("unterminated quoted field");
    if (field_started || !record.empty())
        end_record();
    return records;
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty())
        return std::nullopt;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+')
        ++first;
    double v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        return std::nullopt;
    return v;
}

scalar scalar_from_json(const nlohmann::json& j) {
    if (j.is_null())
        return {};
    if (j.is_boolean())
        return j.get<bool>();
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
        return j.get<std::string>();
    throw std::invalid_argument("nested values are not supported in data records");
}

scalar scalar_from_node(const spec_node& n) {
    switch (n.type) {
    case spec_node::kind::null: return {};
    case spec_node::kind::boolean: return n.boolean;
    case spec_node::kind::number: return n.number;
    case spec_node::kind::string: return n.string;
    default: throw std::invalid_argument("nested values are not supported in data records");
    }
}

} // namespace

table parse_csv(std::string_view text) {
    std::vector<std::vector<bool>> empty;
    auto records = split_csv(text, empty);
    table out;
    if (records.empty())
        return out;
    out.fields = records[0];
    const auto ncols = out.fields.size();

    enum class col_type { number, boolean, string };
    std::vector<col_type> types(ncols, col_type::number);
    std::vector<bool> has_value(ncols, false);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() == 1 && empty[r][0] && ncols != 1)
            continue; // blank line
        if (records[r].size() != ncols)
            throw std::invalid_argument("row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                                        " fields, expected " + std::to_string(ncols));
        for (std::size_t c = 0; c < ncols; ++c) {
            if (empty[r][c])
                continue;
            has_value[c] = true;
            const auto& s = records[r][c];
            bool is_bool = s == "true" || s == "false";
            if (types[c] == col_type::number && !parse_double(s))
                types[c] = is_bool ? col_type::boolean : col_type::string;
            else if (types[c] == col_type::boolean && !is_bool)
                types[c] = col_type::string;
        }
    }
    for (std::size_t c = 0; c < ncols; ++c)
        if (!has_value[c])
            types[c] = col_type::string;

    out.rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != ncols)
            continue;
        row values(ncols);
        for (std::size_t c = 0; c < ncols; ++c) {
            if (empty[r][c])
                continue;
            const auto& s = records[r][c];
            switch (types[c]) {
            case col_type::number: values[c] = *parse_double(s); break;
            case col_type::boolean: values[c] = (s == "true"); break;
            case col_type::string: values[c] = s; break;
            }
        }
        out.rows.push_back(std::move(values));
    }
    return out;
}

table parse_json_records(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(e.what());
    }
    if (!doc.is_array())
        throw std::invalid_argument("expected an array of objects");
    table out;
    for (const auto& rec : doc) {
        if (!rec.is_object())
            throw std::invalid_argument("expected an array of objects");
        row values(out.fields.size());
        for (auto it = rec.begin(); it != rec.end(); ++it) {
            auto idx = out.field_index(it.key());
            if (!idx) {
                out.ensure_field(it.key());
                values.emplace_back();
                idx = out.fields.size() - 1;
            }
            values[*idx] = scalar_from_json(it.value());
        }
        out.rows.push_back(std::move(values));
    }
    return out;
}

table table_from_values(const spec_node& values) {
    table out;
    for (const auto& rec : values.items) {
        row r(out.fields.size());
        for (const auto& m : rec.members) {
            auto idx = out.field_index(m.key);
            if (!idx) {
                out.ensure_field(m.key);
                r.emplace_back();
                idx = out.fields.size() - 1;
            }
            r[*idx] = scalar_from_node(m.value);
        }
        out.rows.push_back(std::move(r));
    }
    return out;
}

table load_table(const std::filesystem::path& file, const spec_path& origin) {
    auto ext = file.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".csv" && ext != ".json")
        throw data_load_error("unsupported data format for " + file.string() + " (expected .csv or .json)", origin);
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw data_load_error("cannot read data file " + file.string(), origin);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return ext == ".csv" ? parse_csv(buf.str()) : parse_json_records(buf.str());
    } catch (const std::invalid_argument& e) {
        throw data_load_error("malformed data file " + file.string() + ": " + e.what(), origin);
    }
}

} // namespace flowlens
