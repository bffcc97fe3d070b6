#pragma once

#include <compare>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flowlens {

// One step of a key path: an object key or an array index.
class path_segment {
public:
    path_segment(std::string key) : value_(std::move(key)) {}
    path_segment(std::string_view key) : value_(std::string(key)) {}
    path_segment(const char* key) : value_(std::string(key)) {}

    template <std::integral I>
    path_segment(I index) : value_(static_cast<std::size_t>(index)) {}

    bool is_key() const noexcept { return std::holds_alternative<std::string>(value_); }
    bool is_index() const noexcept { return !is_key(); }

    const std::string& key() const { return std::get<std::string>(value_); }
    std::size_t index() const { return std::get<std::size_t>(value_); }

    friend bool operator==(const path_segment&, const path_segment&) = default;
    friend bool operator<(const path_segment& a, const path_segment& b) { return a.value_ < b.value_; }

private:
    std::variant<std::string, std::size_t> value_;
};

// Path of keys and indices addressing one node of a spec document.
// The empty path is the document root.
class spec_path {
public:
    spec_path() = default;
    spec_path(std::initializer_list<path_segment> segments) : segments_(segments) {}
    explicit spec_path(std::vector<path_segment> segments) : segments_(std::move(segments)) {}

    const std::vector<path_segment>& segments() const noexcept { return segments_; }
    std::size_t size() const noexcept { return segments_.size(); }
    bool empty() const noexcept { return segments_.empty(); }
    const path_segment& operator[](std::size_t i) const { return segments_[i]; }

    spec_path child(path_segment segment) const;
    spec_path parent() const;

    // True when every segment of *this is a leading segment of `other` (a path is its own prefix).
    bool is_prefix_of(const spec_path& other) const noexcept;

    // RFC 6901 pointer, e.g. "/marks/0/from". The root is "".
    std::string to_pointer() const;

    friend bool operator==(const spec_path&, const spec_path&) = default;
    friend bool operator<(const spec_path& a, const spec_path& b) { return a.segments_ < b.segments_; }

private:
    std::vector<path_segment> segments_;
};

std::string to_string(const spec_path& path);

} // namespace flowlens
