#pragma once

// Number formatting and field splitting shared by the CSV readers/writers.
// Numbers use the shortest representation that round-trips.

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecowalker::csv {

inline void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline std::string number(double v) {
    std::string s;
    append_number(s, v);
    return s;
}

inline std::optional<double> parse_number(std::string_view text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) return std::nullopt;
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace ecowalker::csv
