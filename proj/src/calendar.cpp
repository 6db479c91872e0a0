#include "xcmix/calendar.hpp"

#include "xcmix/error.hpp"

#include <charconv>
#include <climits>
#include <cstdio>

namespace xcmix {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

YearMonth YearMonth::parse(std::string_view text) {
    YearMonth ym;
    if (text.size() != 7 || text[4] != '-' || !parse_int(text.substr(0, 4), ym.year) ||
        !parse_int(text.substr(5, 2), ym.month) || ym.month < 1 || ym.month > 12) {
        throw InputError("invalid year-month '" + std::string(text) + "', expected YYYY-MM");
    }
    return ym;
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

YearMonth previous_month(YearMonth m) {
    if (m.month == 1) return {m.year - 1, 12};
    return {m.year, m.month - 1};
}

YearMonth next_month(YearMonth m) {
    if (m.month == 12) return {m.year + 1, 1};
    return {m.year, m.month + 1};
}

int season_start_year(std::string_view label) {
    auto slash = label.find('/');
    int year = 0;
    if (slash == std::string_view::npos || !parse_int(label.substr(0, slash), year)) return INT_MAX;
    return year;
}

} // namespace xcmix
