#include "riskcast/date.hpp"

#include "riskcast/errors.hpp"

#include <charconv>
#include <cstdio>

namespace riskcast {

// Civil-from-days / days-from-civil after Howard Hinnant's algorithms.
std::int64_t Date::serial() const {
    std::int64_t y = year;
    const int m = month;
    const int d = day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date Date::from_serial(std::int64_t days) {
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<std::int16_t>(y + (m <= 2)), static_cast<std::int8_t>(m),
                static_cast<std::int8_t>(d)};
}

int Date::weekday() const {
    const std::int64_t s = serial();
    // 1970-01-01 was a Thursday (= 3 with Monday = 0).
    return static_cast<int>(((s % 7) + 7 + 3) % 7);
}

bool Date::is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int Date::days_in_month(int y, int m) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

std::string Date::to_string() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", static_cast<int>(year),
                  static_cast<int>(month), static_cast<int>(day));
    return buf;
}

Date Date::parse(std::string_view text) {
    auto fail = [&] { throw FormatError("invalid ISO date: '" + std::string(text) + "'"); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
    int y = 0, m = 0, d = 0;
    auto num = [&](std::size_t off, std::size_t len, int& out) {
        auto res = std::from_chars(text.data() + off, text.data() + off + len, out);
        if (res.ec != std::errc{} || res.ptr != text.data() + off + len) fail();
    };
    num(0, 4, y);
    num(5, 2, m);
    num(8, 2, d);
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) fail();
    return Date{static_cast<std::int16_t>(y), static_cast<std::int8_t>(m),
                static_cast<std::int8_t>(d)};
}

} // namespace riskcast
