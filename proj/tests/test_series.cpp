#include <doctest.h>

#include "riskcast/csv.hpp"
#include "riskcast/errors.hpp"
#include "riskcast/panel.hpp"
#include "riskcast/series.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace riskcast;

namespace {

Date d(int y, int m, int dd) {
    return Date{static_cast<std::int16_t>(y), static_cast<std::int8_t>(m),
                static_cast<std::int8_t>(dd)};
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

} // namespace

TEST_CASE("date arithmetic and parsing") {
    CHECK(Date::parse("2020-02-14") == d(2020, 2, 14));
    CHECK(d(2020, 2, 14).to_string() == "2020-02-14");
    CHECK(d(1970, 1, 1).serial() == 0);
    CHECK(d(1970, 1, 2).serial() == 1);
    CHECK(Date::from_serial(d(2008, 9, 29).serial()) == d(2008, 9, 29));
    CHECK(d(2020, 2, 14).weekday() == 4); // Friday
    CHECK(d(1991, 3, 15).weekday() == 4); // Friday
    CHECK(Date::is_leap(2000));
    CHECK(!Date::is_leap(1900));
    CHECK_THROWS_AS(Date::parse("2020-13-01"), FormatError);
    CHECK_THROWS_AS(Date::parse("2020-02-30"), FormatError);
    CHECK_THROWS_AS(Date::parse("20200214"), FormatError);
    // round-trip across a long span
    for (std::int64_t s = -20000; s <= 40000; s += 17)
        CHECK(Date::from_serial(s).serial() == s);
}

TEST_CASE("load_price_series happy path and row counts") {
    const auto path = write_temp("rc_prices.csv",
                                 "date,value\n2020-01-02,100\n2020-01-03,101\n2020-01-06,102\n");
    const PriceSeries s = load_price_series(path, {}, "toy");
    CHECK(s.size() == 3);
    CHECK(s[0].date == d(2020, 1, 2));
    CHECK(s[2].value == doctest::Approx(102.0));
}

TEST_CASE("load_price_series rejects duplicate dates with an integrity error") {
    const auto path =
        write_temp("rc_dup.csv", "date,value\n2020-01-02,100\n2020-01-02,101\n");
    CHECK_THROWS_AS(load_price_series(path), IntegrityError);
}

TEST_CASE("load_price_series reports the failing row") {
    const auto path = write_temp("rc_bad.csv", "date,value\n2020-01-02,100\n2020-01-03,oops\n");
    try {
        load_price_series(path);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("log_returns matches the definition") {
    const PriceSeries p("x", {{d(2020, 1, 2), 100.0}, {d(2020, 1, 3), 110.0},
                              {d(2020, 1, 6), 110.0}});
    const ReturnSeries r = log_returns(p);
    REQUIRE(r.size() == 2);
    CHECK(r[0].value == doctest::Approx(0.0953102).epsilon(1e-6));
    CHECK(r[1].value == doctest::Approx(0.0));
    CHECK(r[0].date == d(2020, 1, 3));
}

TEST_CASE("log_returns rejects non-positive prices and short series") {
    CHECK_THROWS_AS(log_returns(PriceSeries("x", {{d(2020, 1, 2), 100.0}})), DomainError);
    CHECK_THROWS_AS(
        log_returns(PriceSeries("x", {{d(2020, 1, 2), 100.0}, {d(2020, 1, 3), -1.0}})),
        DomainError);
}

TEST_CASE("returns round-trip to prices through cumulative exponentiation") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<PricePoint> pts;
    double level = 100.0;
    for (int i = 0; i < 500; ++i) {
        pts.push_back({Date::from_serial(18000 + i), level});
        level *= std::exp(noise(rng));
    }
    const PriceSeries p("rt", pts);
    const ReturnSeries r = log_returns(p);
    double rebuilt = p[0].value;
    for (std::size_t i = 0; i < r.size(); ++i) {
        rebuilt *= std::exp(r[i].value);
        CHECK(rebuilt == doctest::Approx(p[i + 1].value).epsilon(1e-12));
    }
}

TEST_CASE("align_panel forward-fills and head-backfills") {
    std::vector<Date> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(Date::from_serial(18280 + i));

    const PriceSeries target("tgt", {[&] {
        std::vector<PricePoint> v;
        for (int i = 0; i < 10; ++i) v.push_back({grid[static_cast<std::size_t>(i)], 100.0 + i});
        return v;
    }()});
    // Sparse series observed on grid days 2 and 6.
    const PriceSeries sparse("cpi", {{grid[2], 2.1}, {grid[6], 2.3}});
    // Series starting after the grid start (head backfill).
    const PriceSeries late("wti", {{grid[4], 30.0}, {grid[7], 31.0}});

    const VariablePanel panel = align_panel({target, sparse, late}, grid, "tgt");
    CHECK(panel.n_vars() == 3);
    CHECK(panel.n_days() == 10);
    const auto& cpi = panel.column("cpi");
    CHECK(cpi[0] == 2.1); // head backfill
    CHECK(cpi[1] == 2.1);
    CHECK(cpi[2] == 2.1);
    CHECK(cpi[5] == 2.1); // forward fill
    CHECK(cpi[6] == 2.3);
    CHECK(cpi[9] == 2.3);
    const auto& wti = panel.column("wti");
    for (int i = 0; i <= 4; ++i) CHECK(wti[static_cast<std::size_t>(i)] == 30.0);
    CHECK(wti[6] == 30.0);
    CHECK(wti[7] == 31.0);

    // A daily series with no gaps comes through unchanged.
    const auto& tgt = panel.column("tgt");
    for (int i = 0; i < 10; ++i) CHECK(tgt[static_cast<std::size_t>(i)] == 100.0 + i);
}

TEST_CASE("align_panel is idempotent") {
    std::vector<Date> grid;
    for (int i = 0; i < 30; ++i) grid.push_back(Date::from_serial(18280 + i));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    std::vector<PricePoint> a, b;
    for (int i = 0; i < 30; ++i) {
        a.push_back({grid[static_cast<std::size_t>(i)], u(rng)});
        if (i % 3 == 0) b.push_back({grid[static_cast<std::size_t>(i)], u(rng)});
    }
    const VariablePanel once = align_panel({PriceSeries("t", a), PriceSeries("b", b)}, grid, "t");
    // Re-align the already-aligned columns.
    std::vector<PriceSeries> as_series;
    for (std::size_t v = 0; v < once.n_vars(); ++v) {
        std::vector<PricePoint> pts;
        for (std::size_t i = 0; i < once.n_days(); ++i)
            pts.push_back({once.dates()[i], once.at(i, v)});
        as_series.emplace_back(once.ids()[v], pts);
    }
    const VariablePanel twice = align_panel(as_series, grid, "t");
    for (std::size_t v = 0; v < once.n_vars(); ++v)
        for (std::size_t i = 0; i < once.n_days(); ++i)
            CHECK(twice.at(i, v) == once.at(i, v));
}

TEST_CASE("align_panel rejects series entirely after the grid") {
    std::vector<Date> grid{d(2020, 1, 2), d(2020, 1, 3)};
    const PriceSeries tgt("t", {{d(2020, 1, 2), 1.0}, {d(2020, 1, 3), 1.0}});
    const PriceSeries future("f", {{d(2021, 1, 4), 1.0}});
    CHECK_THROWS_AS(align_panel({tgt, future}, grid, "t"), CoverageError);
}

TEST_CASE("forward fill never moves information backward past the first observation") {
    std::vector<Date> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(Date::from_serial(19000 + i));
    std::vector<PricePoint> tpts;
    for (int i = 0; i < 50; ++i) tpts.push_back({grid[static_cast<std::size_t>(i)], 1.0});
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> gap(1, 7);
    std::uniform_real_distribution<double> u(5.0, 9.0);
    std::vector<PricePoint> pts;
    for (int i = gap(rng); i < 50; i += gap(rng)) pts.push_back({grid[static_cast<std::size_t>(i)], u(rng)});
    const PriceSeries sparse("s", pts);
    const VariablePanel p = align_panel({PriceSeries("t", tpts), sparse}, grid, "t");
    const auto& col = p.column("s");
    std::size_t k = 0; // index into sparse observations
    for (std::size_t i = 0; i < 50; ++i) {
        while (k + 1 < pts.size() && !(grid[i] < pts[k + 1].date)) ++k;
        if (grid[i] < pts[0].date)
            CHECK(col[i] == pts[0].value); // documented head-backfill region
        else
            CHECK(col[i] == pts[k].value); // most recent on-or-before
    }
}

TEST_CASE("sample_stats basic moments") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const auto s = sample_stats(v);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.sd == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.min == 1.0);
    CHECK(s.max == 4.0);
    CHECK(s.skewness == doctest::Approx(0.0));
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -0.025590}) {
        const std::string text = csv::format_double(v);
        CHECK(std::stod(text) == v);
    }
}
