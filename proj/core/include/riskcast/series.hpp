#pragma once

#include "riskcast/date.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace riskcast {

/// Whether the raw observations are price-like levels or rate-like quotes.
enum class Units { level, rate };

struct PricePoint {
    Date date;
    double value = 0.0;
};

/// Dated series of observed values. Dates strictly increase and every value is
/// finite; both are enforced on construction.
class PriceSeries {
public:
    PriceSeries() = default;
    PriceSeries(std::string id, std::vector<PricePoint> observations, Units units = Units::level);

    const std::string& id() const { return id_; }
    Units units() const { return units_; }
    const std::vector<PricePoint>& observations() const { return obs_; }
    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }
    const PricePoint& front() const { return obs_.front(); }
    const PricePoint& back() const { return obs_.back(); }
    const PricePoint& operator[](std::size_t i) const { return obs_[i]; }

    std::vector<double> values() const;
    std::vector<Date> dates() const;

private:
    std::string id_;
    Units units_ = Units::level;
    std::vector<PricePoint> obs_;
};

struct ReturnPoint {
    Date date;
    double value = 0.0; // natural-log return, 0.01 == 1%
};

/// Dated log-return series; one point per consecutive pair of the source prices.
class ReturnSeries {
public:
    ReturnSeries() = default;
    ReturnSeries(std::string id, std::vector<ReturnPoint> observations);

    const std::string& id() const { return id_; }
    const std::vector<ReturnPoint>& observations() const { return obs_; }
    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }
    const ReturnPoint& operator[](std::size_t i) const { return obs_[i]; }

    std::vector<double> values() const;
    std::vector<Date> dates() const;

private:
    std::string id_;
    std::vector<ReturnPoint> obs_;
};

/// r_t = ln(P_t / P_{t-1}) for every consecutive pair. Prices must be strictly
/// positive and at least two observations long.
ReturnSeries log_returns(const PriceSeries& prices);

/// Column-mapping schema for delimited price files.
struct CsvSchema {
    int date_column = 0;
    int value_column = 1;
    char delimiter = ',';
    bool header = true;
};

/// Loads one `date,value` file into a PriceSeries. Parse failures carry the row
/// number; duplicate or decreasing dates raise IntegrityError.
PriceSeries load_price_series(const std::string& path, const CsvSchema& schema = {},
                              const std::string& id = "", Units units = Units::level);

/// Basic sample moments of a return window (population divisors).
struct SampleStats {
    std::size_t n = 0;
    double mean = 0, sd = 0, min = 0, max = 0, skewness = 0, kurtosis = 0;
};
SampleStats sample_stats(std::span<const double> values);

} // namespace riskcast
