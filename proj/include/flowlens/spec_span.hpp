#pragma once

#include <cstddef>

namespace flowlens {

// Highlightable range of spec text. Lines and columns are 1-based, columns count
// code points; the end position and byte_end are exclusive.
struct spec_span {
    std::size_t start_line = 0;
    std::size_t start_col = 0;
    std::size_t end_line = 0;
    std::size_t end_col = 0;
    std::size_t byte_start = 0;
    std::size_t byte_end = 0;

    bool contains(const spec_span& inner) const noexcept {
        return byte_start <= inner.byte_start && inner.byte_end <= byte_end;
    }

    friend bool operator==(const spec_span&, const spec_span&) = default;
};

} // namespace flowlens
