#pragma once

#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "flowlens/block_tree.hpp"
#include "flowlens/chart_spec.hpp"
#include "flowlens/json_util.hpp"
#include "flowlens/lowering.hpp"
#include "flowlens/report.hpp"
#include "flowlens/runtime.hpp"
#include "flowlens/spec_document.hpp"

namespace flowlens {

// The whole pipeline for one spec text: parse, validate, lower, instantiate and the
// initial pulse. Signal updates then add pulses.
class session {
public:
    session(std::string text, const std::filesystem::path& data_dir);

    const pulse& apply(const signal_update& u) { return rt_->apply_signal(u); }

    const spec_document& doc() const noexcept { return doc_; }
    const chart_spec& chart() const noexcept { return chart_; }
    const block_tree& blocks() const noexcept { return blocks_; }
    const lowered_chart& lowered() const noexcept { return lowered_; }
    const runtime& rt() const noexcept { return *rt_; }
    runtime& rt() noexcept { return *rt_; }

    profile_report report() const { return build_report(doc_, lowered_, blocks_, *rt_); }
    std::string svg() const { return scene_to_svg(rt_->scene()); }

private:
    spec_document doc_;
    chart_spec chart_;
    block_tree blocks_;
    lowered_chart lowered_;
    std::unique_ptr<runtime> rt_;
};

// Machine-readable error: {kind, message, path, span, line, col}. A path without a span is
// resolved against `spec_text` when possible.
json describe_failure(const std::exception& e, std::string_view spec_text);

// One-line form for terminals: "<kind>: <message> [at <path>, line L col C]".
std::string format_failure(const json& detail);

std::string read_text_file(const std::filesystem::path& file); // throws std::runtime_error

} // namespace flowlens
