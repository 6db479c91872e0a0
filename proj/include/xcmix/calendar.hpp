#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace xcmix {

// A calendar month, e.g. 2021-10.
struct YearMonth {
    int year = 0;
    int month = 1; // 1..12

    auto operator<=>(const YearMonth&) const = default;

    static YearMonth parse(std::string_view text); // "YYYY-MM", throws InputError
    std::string str() const;
};

YearMonth previous_month(YearMonth m);
YearMonth next_month(YearMonth m);

// Ordering key for season labels of the form "YY/YY" (e.g. "17/18" -> 17).
// Labels that do not parse sort after all parseable ones.
int season_start_year(std::string_view label);

} // namespace xcmix
