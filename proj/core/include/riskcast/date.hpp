#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace riskcast {

/// Calendar date. No timezone semantics; trading data is keyed by civil date only.
struct Date {
    std::int16_t year = 1970;
    std::int8_t month = 1; // 1..12
    std::int8_t day = 1;   // 1..31

    auto operator<=>(const Date&) const = default;

    /// Days since 1970-01-01 (proleptic Gregorian).
    std::int64_t serial() const;
    /// 0 = Monday .. 6 = Sunday.
    int weekday() const;
    /// ISO-8601 "YYYY-MM-DD".
    std::string to_string() const;

    static Date from_serial(std::int64_t days);
    /// Parses "YYYY-MM-DD"; throws FormatError on anything else.
    static Date parse(std::string_view text);
    static bool is_leap(int year);
    static int days_in_month(int year, int month);

    Date next_day() const { return from_serial(serial() + 1); }
};

} // namespace riskcast
