#include "riskcast/sample_data.hpp"

#include "riskcast/csv.hpp"
#include "riskcast/distributions.hpp"
#include "riskcast/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>

namespace riskcast {

namespace {

// ---------------------------------------------------------------------------
// Trading calendar
// ---------------------------------------------------------------------------

Date easter_sunday(int y) {
    const int a = y % 19, b = y / 100, c = y % 100, d = b / 4, e = b % 4;
    const int f = (b + 8) / 25, g = (b - f + 1) / 3;
    const int h = (19 * a + b - d - g + 15) % 30;
    const int i = c / 4, k = c % 4;
    const int l = (32 + 2 * e + 2 * i - h - k) % 7;
    const int m = (a + 11 * h + 22 * l) / 451;
    const int month = (h + l - 7 * m + 114) / 31;
    const int day = (h + l - 7 * m + 114) % 31 + 1;
    return Date{static_cast<std::int16_t>(y), static_cast<std::int8_t>(month),
                static_cast<std::int8_t>(day)};
}

Date nth_weekday(int y, int m, int weekday, int n) {
    Date d{static_cast<std::int16_t>(y), static_cast<std::int8_t>(m), 1};
    while (d.weekday() != weekday) d = d.next_day();
    return Date::from_serial(d.serial() + 7 * (n - 1));
}

Date last_weekday(int y, int m, int weekday) {
    Date d{static_cast<std::int16_t>(y), static_cast<std::int8_t>(m),
           static_cast<std::int8_t>(Date::days_in_month(y, m))};
    while (d.weekday() != weekday) d = Date::from_serial(d.serial() - 1);
    return d;
}

std::set<Date> market_holidays(int y) {
    std::set<Date> hs;
    const Date nyd{static_cast<std::int16_t>(y), 1, 1};
    if (nyd.weekday() == 6)
        hs.insert(nyd.next_day()); // Sunday observed Monday
    else if (nyd.weekday() < 5)
        hs.insert(nyd); // Saturday not observed
    if (y >= 1998) hs.insert(nth_weekday(y, 1, 0, 3));
    hs.insert(nth_weekday(y, 2, 0, 3));
    hs.insert(Date::from_serial(easter_sunday(y).serial() - 2)); // Good Friday
    hs.insert(last_weekday(y, 5, 0));
    const Date july4{static_cast<std::int16_t>(y), 7, 4};
    if (july4.weekday() == 5)
        hs.insert(Date::from_serial(july4.serial() - 1));
    else if (july4.weekday() == 6)
        hs.insert(july4.next_day());
    else
        hs.insert(july4);
    hs.insert(nth_weekday(y, 9, 0, 1));
    hs.insert(nth_weekday(y, 11, 3, 4));
    const Date xmas{static_cast<std::int16_t>(y), 12, 25};
    if (xmas.weekday() == 5)
        hs.insert(Date::from_serial(xmas.serial() - 1));
    else if (xmas.weekday() == 6)
        hs.insert(xmas.next_day());
    else
        hs.insert(xmas);
    return hs;
}

const std::set<Date>& special_closures() {
    static const std::set<Date> days = {
        Date::parse("1985-09-27"), Date::parse("1994-04-27"), Date::parse("2001-09-11"),
        Date::parse("2001-09-12"), Date::parse("2001-09-13"), Date::parse("2001-09-14"),
        Date::parse("2004-06-11"), Date::parse("2007-01-02"), Date::parse("2012-10-29"),
        Date::parse("2012-10-30"), Date::parse("2018-12-05"),
    };
    return days;
}

// ---------------------------------------------------------------------------
// Target return synthesis: piecewise era volatility/drift, a multiplicative
// volatility cluster process with leverage, fat-tailed shocks, and documented
// market-event days pinned to their historical log returns.
// ---------------------------------------------------------------------------

struct Era {
    const char* from; // inclusive
    double vol;       // baseline daily sd
    double drift;
};

// clang-format off
constexpr Era kEras[] = {
    {"1981-03-01", 0.0105, -0.00010},
    {"1982-08-01", 0.0082,  0.00095},
    {"1987-01-02", 0.0105,  0.00120},
    {"1987-10-01", 0.0200, -0.00100},
    {"1988-01-04", 0.0092,  0.00060},
    {"1990-07-02", 0.0100,  0.00030},
    {"1991-03-15", 0.0062,  0.00055},
    {"1994-01-03", 0.0056,  0.00060},
    {"1997-01-02", 0.0098,  0.00100},
    {"1998-01-02", 0.0112,  0.00085},
    {"1999-01-04", 0.0108,  0.00055},
    {"2000-09-01", 0.0132, -0.00080},
    {"2003-01-02", 0.0100,  0.00090},
    {"2004-01-02", 0.0064,  0.00040},
    {"2007-01-03", 0.0092,  0.00020},
    {"2008-01-02", 0.0132, -0.00060},
    {"2008-09-02", 0.0215, -0.00100},
    {"2009-05-01", 0.0128,  0.00100},
    {"2010-01-04", 0.0098,  0.00050},
    {"2011-01-03", 0.0126,  0.00000},
    {"2012-01-03", 0.0074,  0.00060},
    {"2015-01-02", 0.0088,  0.00030},
    {"2017-01-03", 0.0050,  0.00070},
    {"2018-01-02", 0.0102, -0.00015},
    {"2019-01-02", 0.0074,  0.00080},
};

// Documented market-event day log returns (public history; the two extremes
// and the 2008-09-29 breach day anchor the sample statistics). Crisis bursts
// carry their interstitial calm days as well: the big-small-big alternation
// inside real drawdowns is what separates one-day-memory models from the
// persistent recursions.
constexpr std::pair<const char*, double> kEventReturns[] = {
    {"1982-08-17",  0.0476}, {"1986-09-11", -0.0483}, {"1987-10-16", -0.0516},
    {"1987-10-19", -0.2290}, {"1987-10-20",  0.0510}, {"1987-10-21",  0.0871},
    {"1987-10-22", -0.0396}, {"1987-10-26", -0.0838}, {"1987-10-29",  0.0480},
    {"1988-01-08", -0.0700}, {"1989-10-13", -0.0637}, {"1990-08-06", -0.0304},
    {"1991-08-19", -0.0241},
    // October 1997: a ramp of mid-size losses, a quiet Friday, then the crash.
    {"1997-10-16", -0.0155}, {"1997-10-17", -0.0140}, {"1997-10-20",  0.0032},
    {"1997-10-21",  0.0123}, {"1997-10-22", -0.0158}, {"1997-10-23", -0.0232},
    {"1997-10-24", -0.0068}, {"1997-10-27", -0.0711},
    {"1997-10-28",  0.0499}, {"1997-10-30", -0.0162},
    // August 1998: ramp, gap day, crash.
    {"1998-08-21", -0.0144}, {"1998-08-25",  0.0072}, {"1998-08-26", -0.0081},
    {"1998-08-27", -0.0387}, {"1998-08-28", -0.0067}, {"1998-08-31", -0.0704},
    {"1998-09-01",  0.0374}, {"1998-09-08",  0.0496}, {"1998-09-10", -0.0255},
    {"1998-09-30", -0.0308}, {"1998-10-01", -0.0304}, {"1998-10-08", -0.0119},
    {"1998-10-15",  0.0408},
    {"2000-01-04", -0.0391}, {"2000-02-18", -0.0304}, {"2000-03-16",  0.0465},
    {"2000-04-12", -0.0223}, {"2000-04-13", -0.0068},
    {"2000-04-14", -0.0601}, {"2001-01-03",  0.0489}, {"2001-03-12", -0.0438},
    {"2001-04-03", -0.0348}, {"2001-04-05",  0.0438}, {"2001-09-17", -0.0505},
    {"2002-07-24",  0.0557}, {"2002-07-29",  0.0532}, {"2002-10-15",  0.0472},
    {"2007-02-26",  0.0021}, {"2007-02-27", -0.0353}, {"2007-08-09", -0.0300},
    // September-December 2008: the Lehman sequence with its real gap days.
    {"2008-09-09", -0.0343}, {"2008-09-12",  0.0021}, {"2008-09-15", -0.0481}, {"2008-09-16",  0.0173},
    {"2008-09-17", -0.0471}, {"2008-09-18",  0.0419}, {"2008-09-19",  0.0397},
    {"2008-09-22", -0.0386}, {"2008-09-25",  0.0196}, {"2008-09-26",  0.0034},
    {"2008-09-29", -0.0920}, {"2008-09-30",  0.0527}, {"2008-10-01", -0.0045},
    {"2008-10-02", -0.0407}, {"2008-10-03", -0.0138}, {"2008-10-06", -0.0395},
    {"2008-10-07", -0.0591}, {"2008-10-08", -0.0115}, {"2008-10-09", -0.0762},
    {"2008-10-10", -0.0118}, {"2008-10-13",  0.1096}, {"2008-10-14", -0.0053},
    {"2008-10-15", -0.0947}, {"2008-10-16",  0.0425}, {"2008-10-17", -0.0062},
    {"2008-10-20",  0.0460}, {"2008-10-21", -0.0312}, {"2008-10-22", -0.0620},
    {"2008-10-23",  0.0124}, {"2008-10-24", -0.0357}, {"2008-10-28",  0.1025},
    {"2008-10-29", -0.0110}, {"2008-11-04",  0.0399}, {"2008-11-05", -0.0540},
    {"2008-11-06", -0.0517}, {"2008-11-12", -0.0538}, {"2008-11-13",  0.0670},
    {"2008-11-14", -0.0432}, {"2008-11-19", -0.0616}, {"2008-11-20", -0.0695},
    {"2008-11-21",  0.0611}, {"2008-11-24",  0.0626}, {"2008-11-25",  0.0065},
    {"2008-12-01", -0.0890}, {"2008-12-02",  0.0387}, {"2008-12-05",  0.0357},
    {"2009-01-20", -0.0535}, {"2009-03-10",  0.0607}, {"2009-03-23",  0.0684},
    {"2010-05-06", -0.0332}, {"2010-05-07", -0.0154}, {"2010-05-10",  0.0430},
    {"2010-06-04", -0.0349},
    // August 2011: downgrade burst with its quiet Friday.
    {"2011-08-02", -0.0259}, {"2011-08-04", -0.0490}, {"2011-08-05", -0.0006},
    {"2011-08-08", -0.0690}, {"2011-08-09",  0.0463}, {"2011-08-10", -0.0452},
    {"2011-08-11",  0.0453}, {"2011-08-18", -0.0445}, {"2011-11-09", -0.0374},
    {"2011-11-30",  0.0424},
    {"2013-06-20", -0.0254}, {"2015-08-20", -0.0214}, {"2015-08-21", -0.0324},
    {"2015-08-24", -0.0402}, {"2015-08-25", -0.0137}, {"2015-08-26",  0.0383},
    {"2016-06-24", -0.0366}, {"2016-06-27", -0.0181},
    {"2018-02-02", -0.0214}, {"2018-02-05", -0.0424}, {"2018-02-06",  0.0172},
    {"2018-02-07", -0.0050}, {"2018-02-08", -0.0382}, {"2018-10-10", -0.0331}, {"2018-10-11", -0.0206},
    {"2018-12-04", -0.0328}, {"2018-12-24", -0.0274}, {"2018-12-26",  0.0484},
    {"2019-08-05", -0.0303}, {"2019-08-14", -0.0293},
};
// clang-format on

constexpr double kOosMeanTarget = 0.0003;
constexpr double kOosSdTarget = 0.0110;
constexpr double kNonEventCap = 0.082; // soft ceiling keeps the pinned extremes extreme

struct EraView {
    std::vector<Date> starts;
    std::vector<double> vol, drift;
    std::size_t locate(Date d) const {
        const auto it = std::upper_bound(starts.begin(), starts.end(), d);
        return it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin() - 1);
    }
};

EraView make_era_view() {
    EraView v;
    for (const Era& e : kEras) {
        v.starts.push_back(Date::parse(e.from));
        v.vol.push_back(e.vol);
        v.drift.push_back(e.drift);
    }
    return v;
}

double soft_cap(double r) {
    if (std::abs(r) <= kNonEventCap) return r;
    const double sign = r > 0 ? 1.0 : -1.0;
    return sign * (kNonEventCap + 0.008 * std::tanh((std::abs(r) - kNonEventCap) / 0.008));
}

std::vector<double> synthesize_target_returns(const std::vector<Date>& days,
                                              std::size_t oos_start, std::uint64_t seed,
                                              std::vector<bool>& is_event) {
    const EraView eras = make_era_view();
    std::map<Date, double> events;
    for (const auto& [text, value] : kEventReturns) events.emplace(Date::parse(text), value);

    std::mt19937_64 rng(seed ^ 0x53504c31ull);
    std::uniform_real_distribution<double> uniform(1e-12, 1.0 - 1e-12);
    const InnovationDist innov = InnovationDist::skewed_t(10.0, 0.965);

    const std::size_t n = days.size() - 1; // returns start on days[1]
    std::vector<double> r(n);
    is_event.assign(n, false);

    // Volatility cluster around the era baseline: slow log-variance recursion
    // with leverage. Day-to-day moves are small; isolated outlier days carry
    // almost no volatility information, which is what the era's conditional
    // models see in the real series.
    const double b_decay = 0.985, a_shock = 0.055, leverage = -0.045;
    double log_g2 = 0.0;
    double prev_z = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const Date day = days[t + 1];
        const std::size_t era = eras.locate(day);
        const double c_abs = 0.78; // approximate E|z| of the innovation
        log_g2 = b_decay * log_g2 + a_shock * (std::abs(prev_z) - c_abs) + leverage * prev_z;
        log_g2 = std::clamp(log_g2, -1.0, 1.0);
        const double sigma = eras.vol[era] * std::exp(0.5 * log_g2);
        const double z = quantile(innov, uniform(rng));
        const auto ev = events.find(day);
        if (ev != events.end()) {
            r[t] = ev->second;
            is_event[t] = true;
            prev_z = std::clamp(ev->second / sigma, -6.0, 6.0);
        } else {
            r[t] = soft_cap(eras.drift[era] + sigma * z);
            prev_z = z;
        }
    }

    // Calibrate the out-of-sample moments on the non-event days: scale
    // deviations to hit the sd target, then shift to hit the mean target.
    const std::size_t oos_r0 = oos_start - 1; // return index of the first OOS day
    for (int pass = 0; pass < 3; ++pass) {
        double ev_sum = 0, ne_sum = 0;
        std::size_t ev_n = 0, ne_n = 0;
        for (std::size_t t = oos_r0; t < n; ++t) {
            if (is_event[t]) {
                ev_sum += r[t];
                ++ev_n;
            } else {
                ne_sum += r[t];
                ++ne_n;
            }
        }
        const double total = static_cast<double>(ev_n + ne_n);
        const double ne_mean = ne_sum / static_cast<double>(ne_n);
        // Second moment about the target mean.
        double ev_ss = 0, ne_ss = 0;
        for (std::size_t t = oos_r0; t < n; ++t) {
            const double d = r[t] - kOosMeanTarget;
            (is_event[t] ? ev_ss : ne_ss) += d * d;
        }
        const double want_ne_ss = kOosSdTarget * kOosSdTarget * total - ev_ss;
        const double scale = want_ne_ss > 0 ? std::sqrt(want_ne_ss / ne_ss) : 1.0;
        for (std::size_t t = 0; t < n; ++t)
            if (!is_event[t])
                r[t] = soft_cap(kOosMeanTarget + scale * (r[t] - ne_mean) +
                                (ne_mean - kOosMeanTarget));
        // Exact mean shift on the out-of-sample non-event days.
        double sum = 0;
        for (std::size_t t = oos_r0; t < n; ++t) sum += r[t];
        const double shift =
            (kOosMeanTarget * total - sum) / static_cast<double>(ne_n);
        for (std::size_t t = 0; t < n; ++t)
            if (!is_event[t]) r[t] += shift;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Predictor synthesis
// ---------------------------------------------------------------------------

struct VariableSpec {
    const char* id;
    const char* frequency; // daily | weekly | monthly | quarterly
    Units units;
    double level0;     // starting level
    double loading;    // co-movement with the target daily return
    double idio_vol;   // daily idiosyncratic volatility (log scale for levels)
    double drift;      // daily log drift
    int head_miss;     // trading days missing at the head (late-start series)
    bool mean_revert;  // OU in log-level instead of a random walk
};

// clang-format off
constexpr VariableSpec kPredictors[] = {
    {"audusd",             "daily",    Units::rate,   0.85, -0.05, 0.0060,  0.0,      0, true},
    {"bcom",               "daily",    Units::level, 105.0,  0.10, 0.0080,  2e-5,     0, false},
    {"ustreasury_tr",      "daily",    Units::level, 100.0, -0.06, 0.0030,  2.4e-4,   0, false},
    {"cadusd",             "daily",    Units::rate,   0.80, -0.04, 0.0045,  0.0,      0, true},
    {"canola",             "daily",    Units::level, 320.0,  0.03, 0.0110,  4e-5,     0, false},
    {"corn",               "daily",    Units::level, 260.0,  0.03, 0.0120,  3e-5,     0, false},
    {"eurusd",             "daily",    Units::rate,   1.15, -0.06, 0.0055,  0.0,      0, true},
    {"fedfunds",           "daily",    Units::rate,   9.00, -0.02, 0.0035, -1.5e-4,   0, true},
    {"ftse100",            "daily",    Units::level, 1300.0, 0.62, 0.0075,  2.0e-4, 700, false},
    {"gold",               "daily",    Units::level, 480.0, -0.08, 0.0090,  6e-5,     0, false},
    {"gbpusd",             "daily",    Units::rate,   2.00, -0.05, 0.0055,  0.0,      0, true},
    {"jpyusd",             "daily",    Units::rate,   0.0047, -0.07, 0.0058, 0.0,     0, true},
    {"nikkei",             "daily",    Units::level, 7000.0, 0.45, 0.0115,  1.2e-4,   0, false},
    {"oats",               "daily",    Units::level, 150.0,  0.02, 0.0140,  3e-5,     0, false},
    {"rus1000",            "daily",    Units::level,  75.0,  0.88, 0.0034,  2.6e-4,   0, false},
    {"rus2000",            "daily",    Units::level, 130.0,  0.74, 0.0062,  2.2e-4,   0, false},
    {"rus3000",            "daily",    Units::level,  80.0,  0.86, 0.0038,  2.5e-4,   0, false},
    {"silver",             "daily",    Units::level,  12.0, -0.05, 0.0140,  4e-5,     0, false},
    {"soymeal",            "daily",    Units::level, 200.0,  0.02, 0.0120,  3e-5,     0, false},
    {"soyoil",             "daily",    Units::level,  22.0,  0.02, 0.0120,  3e-5,     0, false},
    {"soybean",            "daily",    Units::level, 620.0,  0.03, 0.0110,  3e-5,     0, false},
    {"spasx",              "daily",    Units::level, 500.0,  0.48, 0.0085,  2.0e-4,   0, false},
    {"sptsx",              "daily",    Units::level, 2200.0, 0.66, 0.0060,  2.0e-4,   0, false},
    {"libor3m",            "daily",    Units::rate,   8.50, -0.02, 0.0040, -1.4e-4, 500, true},
    {"topix",              "daily",    Units::level, 550.0,  0.44, 0.0110,  1.1e-4,   0, false},
    {"us_cpi",             "monthly",  Units::level,  88.0,  0.00, 0.0016,  1.05e-4,  0, false},
    {"aaa_spread",         "daily",    Units::rate,   1.20, -0.10, 0.0120,  0.0,    300, true},
    {"uscorp_bond",        "daily",    Units::level, 100.0,  0.05, 0.0035,  2.6e-4,   0, false},
    {"disp_income_growth", "quarterly",Units::level, 100.0,  0.00, 0.0100,  1.1e-4,   0, false},
    {"full_employment",    "monthly",  Units::level,  97.0,  0.01, 0.0040,  4.0e-5,   0, false},
    {"jobless_claims",     "weekly",   Units::level, 380.0, -0.08, 0.0180, -1e-5,     0, true},
    {"m1_money",           "weekly",   Units::level, 420.0,  0.00, 0.0028,  2.1e-4,   0, false},
    {"m2_money",           "weekly",   Units::level, 1700.0, 0.00, 0.0020,  2.3e-4,   0, false},
    {"ism_manufacturing",  "monthly",  Units::level,  52.0,  0.05, 0.0160,  0.0,      0, true},
    {"manufacturing_tendency","monthly",Units::level, 100.0, 0.04, 0.0110,  0.0,      0, true},
    {"nonfarm_payroll",    "monthly",  Units::level, 91000.0, 0.02, 0.0022, 5.5e-5,   0, false},
    {"parttime_employment","monthly",  Units::level, 18000.0, -0.01, 0.0050, 3.0e-5,  0, false},
    {"policy_uncertainty", "daily",    Units::level, 100.0, -0.15, 0.0480,  0.0,    981, true},
    {"wti",                "daily",    Units::level,  34.0,  0.04, 0.0170,  2e-5,   900, false},
    {"wheat",              "daily",    Units::level, 380.0,  0.02, 0.0120,  3e-5,     0, false},
    {"ust10y",             "daily",    Units::rate,  12.50, -0.03, 0.0045, -1.6e-4,   0, true},
};
// clang-format on

std::uint64_t stream_seed(std::uint64_t base, const std::string& id) {
    std::uint64_t h = base ^ 0xcbf29ce484222325ull;
    for (char c : id) h = (h ^ static_cast<std::uint64_t>(c)) * 0x100000001b3ull;
    return h;
}

std::vector<Date> weekly_dates(Date from, Date to) {
    std::vector<Date> out;
    Date d = from;
    while (d.weekday() != 3) d = d.next_day(); // Thursdays
    for (; d <= to; d = Date::from_serial(d.serial() + 7)) out.push_back(d);
    return out;
}

std::vector<Date> monthly_dates(Date from, Date to) {
    std::vector<Date> out;
    int y = from.year, m = from.month;
    while (true) {
        const Date d{static_cast<std::int16_t>(y), static_cast<std::int8_t>(m), 3};
        if (d > to) break;
        if (d >= from) out.push_back(d);
        if (++m > 12) {
            m = 1;
            ++y;
        }
    }
    return out;
}

std::vector<Date> quarterly_dates(Date from, Date to) {
    std::vector<Date> out;
    for (const Date& d : monthly_dates(from, to))
        if ((d.month - 1) % 3 == 0) out.push_back(d);
    return out;
}

} // namespace

std::vector<Date> trading_calendar(Date from, Date to) {
    std::vector<Date> out;
    std::map<int, std::set<Date>> cache;
    const auto& closures = special_closures();
    for (Date d = from; d <= to; d = d.next_day()) {
        if (d.weekday() >= 5) continue;
        auto [it, fresh] = cache.try_emplace(d.year);
        if (fresh) it->second = market_holidays(d.year);
        if (it->second.count(d) || closures.count(d)) continue;
        out.push_back(d);
    }
    return out;
}

SampleDataSummary generate_sample_dataset(const SampleDataOptions& options) {
    namespace fs = std::filesystem;
    if (options.out_dir.empty()) throw InputError("sample data: output directory required");
    fs::create_directories(options.out_dir);

    const Date pivot = Date::parse("1991-03-15");
    const Date last = Date::parse("2020-02-14");
    const std::vector<Date> pre = trading_calendar(Date::parse("1980-06-02"), Date::parse("1991-03-14"));
    constexpr std::size_t kStagingCloses = 2529; // two 1,264-day windows + seed close
    if (pre.size() < kStagingCloses) throw StagingError("sample data: staging span too short");
    std::vector<Date> days(pre.end() - static_cast<std::ptrdiff_t>(kStagingCloses), pre.end());
    const std::vector<Date> oos = trading_calendar(pivot, last);
    days.insert(days.end(), oos.begin(), oos.end());

    const std::size_t oos_start = kStagingCloses; // index of the pivot close
    std::vector<bool> is_event;
    const std::vector<double> r =
        synthesize_target_returns(days, oos_start, options.seed, is_event);

    // Price path anchored near the historical level at the series start.
    std::vector<double> close(days.size());
    close[0] = 136.0;
    for (std::size_t t = 1; t < days.size(); ++t) close[t] = close[t - 1] * std::exp(r[t - 1]);

    auto write_series = [&](const std::string& id, const std::vector<Date>& dates,
                            const std::vector<double>& values) {
        std::vector<std::string> lines;
        lines.reserve(values.size() + 1);
        lines.emplace_back("date,value");
        for (std::size_t i = 0; i < values.size(); ++i)
            lines.push_back(dates[i].to_string() + "," + csv::format_double(values[i]));
        csv::write_lines((fs::path(options.out_dir) / (id + ".csv")).string(), lines);
    };
    write_series("sp500", days, close);

    // Predictors: factor-linked daily processes sampled at their frequency.
    nlohmann::json manifest;
    manifest["target"] = "sp500";
    manifest["variables"] = nlohmann::json::array();
    manifest["variables"].push_back(
        {{"id", "sp500"}, {"path", "sp500.csv"}, {"frequency", "daily"}, {"units", "level"}});

    for (const VariableSpec& spec : kPredictors) {
        std::mt19937_64 rng(stream_seed(options.seed, spec.id));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> level(days.size());
        double log_level = std::log(spec.level0);
        const double anchor = std::log(spec.level0);
        for (std::size_t t = 0; t < days.size(); ++t) {
            if (t > 0) {
                const double target_r = r[t - 1];
                double step = spec.drift + spec.loading * target_r + spec.idio_vol * gauss(rng);
                if (spec.mean_revert) step += 0.004 * (anchor - log_level);
                log_level += step;
            }
            level[t] = std::exp(log_level);
        }

        std::vector<Date> dates;
        std::vector<double> values;
        const Date first_obs = days[static_cast<std::size_t>(spec.head_miss)];
        const std::string freq(spec.frequency);
        if (freq == "daily") {
            for (std::size_t t = 0; t < days.size(); ++t) {
                if (days[t] < first_obs) continue;
                dates.push_back(days[t]);
                values.push_back(level[t]);
            }
        } else {
            const std::vector<Date> schedule =
                freq == "weekly"    ? weekly_dates(first_obs, last)
                : freq == "monthly" ? monthly_dates(first_obs, last)
                                    : quarterly_dates(first_obs, last);
            std::size_t t = 0;
            for (const Date& d : schedule) {
                while (t + 1 < days.size() && days[t + 1] <= d) ++t; // last trading day <= d
                dates.push_back(d);
                values.push_back(level[t]);
            }
        }
        write_series(spec.id, dates, values);
        manifest["variables"].push_back({{"id", spec.id},
                                         {"path", std::string(spec.id) + ".csv"},
                                         {"frequency", freq},
                                         {"units", spec.units == Units::rate ? "rate" : "level"}});
    }

    const std::string manifest_path = (fs::path(options.out_dir) / "manifest.json").string();
    csv::write_lines(manifest_path, {manifest.dump(2)});

    SampleDataSummary summary;
    summary.n_days = static_cast<int>(days.size());
    summary.first_date = days.front();
    summary.last_date = days.back();
    summary.first_out_of_sample = days[oos_start];
    summary.out_of_sample_days = static_cast<int>(days.size() - oos_start);
    summary.oos_stats = sample_stats(
        std::span<const double>(r.data() + (oos_start - 1), days.size() - oos_start));
    summary.manifest_path = manifest_path;
    return summary;
}

} // namespace riskcast
