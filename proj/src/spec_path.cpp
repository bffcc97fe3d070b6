#include "flowlens/spec_path.hpp"

#include <algorithm>

namespace flowlens {

spec_path spec_path::child(path_segment segment) const {
    auto out = *this;
    out.segments_.push_back(std::move(segment));
    return out;
}

spec_path spec_path::parent() const {
    auto out = *this;
    if (!out.segments_.empty())
        out.segments_.pop_back();
    return out;
}

bool spec_path::is_prefix_of(const spec_path& other) const noexcept {
    if (segments_.size() > other.segments_.size())
        return false;
    return std::equal(segments_.begin(), segments_.end(), other.segments_.begin());
}

std::string spec_path::to_pointer() const {
    std::string out;
    for (const auto& s : segments_) {
        out += '/';
        if (s.is_index()) {
            out += std::to_string(s.index());
            continue;
        }
        for (char c : s.key()) {
            if (c == '~')
                out += "~0";
            else if (c == '/')
                out += "~1";
            else
                out += c;
        }
    }
    return out;
}

std::string to_string(const spec_path& path) {
    return path.empty() ? std::string("/") : path.to_pointer();
}

} // namespace flowlens
