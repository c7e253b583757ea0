#include "riskcast/series.hpp"

#include "riskcast/csv.hpp"
#include "riskcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace riskcast {

namespace {

template <typename Point>
void check_monotone_finite(const std::string& id, const std::vector<Point>& obs) {
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (!std::isfinite(obs[i].value))
            throw IntegrityError(id + ": non-finite value at " + obs[i].date.to_string());
        if (i > 0 && !(obs[i - 1].date < obs[i].date)) {
            const bool dup = obs[i - 1].date == obs[i].date;
            throw IntegrityError(id + (dup ? ": duplicate date " : ": non-increasing date ") +
                                 obs[i].date.to_string());
        }
    }
}

} // namespace

PriceSeries::PriceSeries(std::string id, std::vector<PricePoint> observations, Units units)
    : id_(std::move(id)), units_(units), obs_(std::move(observations)) {
    check_monotone_finite(id_, obs_);
}

std::vector<double> PriceSeries::values() const {
    std::vector<double> out(obs_.size());
    std::transform(obs_.begin(), obs_.end(), out.begin(), [](const auto& p) { return p.value; });
    return out;
}

std::vector<Date> PriceSeries::dates() const {
    std::vector<Date> out(obs_.size());
    std::transform(obs_.begin(), obs_.end(), out.begin(), [](const auto& p) { return p.date; });
    return out;
}

ReturnSeries::ReturnSeries(std::string id, std::vector<ReturnPoint> observations)
    : id_(std::move(id)), obs_(std::move(observations)) {
    check_monotone_finite(id_, obs_);
}

std::vector<double> ReturnSeries::values() const {
    std::vector<double> out(obs_.size());
    std::transform(obs_.begin(), obs_.end(), out.begin(), [](const auto& p) { return p.value; });
    return out;
}

std::vector<Date> ReturnSeries::dates() const {
    std::vector<Date> out(obs_.size());
    std::transform(obs_.begin(), obs_.end(), out.begin(), [](const auto& p) { return p.date; });
    return out;
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.size() < 2)
        throw DomainError(prices.id() + ": need at least two prices for returns");
    std::vector<ReturnPoint> out;
    out.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const double prev = prices[i - 1].value;
        const double cur = prices[i].value;
        if (!(prev > 0.0) || !(cur > 0.0))
            throw DomainError(prices.id() + ": non-positive price at " +
                              prices[i].date.to_string());
        out.push_back({prices[i].date, std::log(cur / prev)});
    }
    return ReturnSeries(prices.id(), std::move(out));
}

PriceSeries load_price_series(const std::string& path, const CsvSchema& schema,
                              const std::string& id, Units units) {
    const auto lines = csv::read_lines(path);
    std::vector<PricePoint> obs;
    obs.reserve(lines.size());
    const int needed = std::max(schema.date_column, schema.value_column) + 1;
    for (std::size_t row = 0; row < lines.size(); ++row) {
        if (row == 0 && schema.header) continue;
        const auto fields = csv::split(lines[row], schema.delimiter);
        const std::string where = path + ":" + std::to_string(row + 1);
        if (static_cast<int>(fields.size()) < needed)
            throw FormatError("too few columns (" + where + ")");
        Date date;
        try {
            date = Date::parse(fields[static_cast<std::size_t>(schema.date_column)]);
        } catch (const FormatError& e) {
            throw FormatError(std::string(e.what()) + " (" + where + ")");
        }
        const double value =
            csv::parse_double(fields[static_cast<std::size_t>(schema.value_column)], where);
        obs.push_back({date, value});
    }
    return PriceSeries(id.empty() ? path : id, std::move(obs), units);
}

SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    s.n = values.size();
    if (values.empty()) return s;
    double sum = 0;
    s.min = values[0];
    s.max = values[0];
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(s.n);
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : values) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double n = static_cast<double>(s.n);
    m2 /= n;
    m3 /= n;
    m4 /= n;
    s.sd = std::sqrt(m2);
    s.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    s.kurtosis = m2 > 0 ? m4 / (m2 * m2) : 0.0;
    return s;
}

} // namespace riskcast
