#include "crossview/text.hpp"

#include <charconv>
#include <cmath>

#include "crossview/error.hpp"

namespace crossview {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view field, const std::string& context) {
    double value = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw Error(context + ": invalid number '" + std::string(field) + "'");
    }
    return value;
}

long long parse_int(std::string_view field, const std::string& context) {
    long long value = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw Error(context + ": invalid integer '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace crossview
