#include "flowlens/session.hpp"

#include <fstream>
#include <sstream>

#include "flowlens/errors.hpp"

namespace flowlens {

session::session(std::string text, const std::filesystem::path& data_dir)
    : doc_(parse_spec(std::move(text))),
      chart_(validate(doc_)),
      blocks_(block_hierarchy(doc_, chart_)),
      lowered_(lower(chart_)),
      rt_(std::make_unique<runtime>(lowered_.desc, chart_, data_dir)) {
    rt_->run_initial();
}

json describe_failure(const std::exception& e, std::string_view spec_text) {
    json out{{"kind", "Error"}, {"message", e.what()}, {"path", nullptr}, {"span", nullptr},
             {"line", nullptr}, {"col", nullptr}};
    if (const auto* se = dynamic_cast<const syntax_error*>(&e)) {
        out["kind"] = se->kind();
        out["line"] = se->line();
        out["col"] = se->column();
        return out;
    }
    const auto* fe = dynamic_cast<const error*>(&e);
    if (!fe)
        return out;
    out["kind"] = fe->kind();
    auto span = fe->span();
    if (fe->path()) {
        out["path"] = to_json(*fe->path());
        if (!span) {
            try {
                auto doc = parse_spec(std::string(spec_text));
                // Nearest resolvable ancestor, e.g. when the path names a missing key.
                auto p = *fe->path();
                while (!doc.resolve(p) && !p.empty())
                    p = p.parent();
                span = span_of(doc, p);
            } catch (const std::exception&) {
            }
        }
    }
    if (span) {
        out["span"] = to_json(*span);
        out["line"] = span->start_line;
        out["col"] = span->start_col;
    }
    return out;
}

std::string format_failure(const json& d) {
    std::string s = d["kind"].get<std::string>() + ": " + d["message"].get<std::string>();
    std::string where;
    if (!d["path"].is_null())
        where = "at " + to_string(path_from_json(d["path"]));
    if (!d["line"].is_null()) {
        if (!where.empty())
            where += ", ";
        where += "line " + std::to_string(d["line"].get<std::size_t>()) + " col " +
                 std::to_string(d["col"].get<std::size_t>());
    }
    if (!d["span"].is_null()) {
        auto sp = span_from_json(d["span"]);
        where += " to line " + std::to_string(sp.end_line) + " col " + std::to_string(sp.end_col);
    }
    return where.empty() ? s : s + " [" + where + "]";
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace flowlens
