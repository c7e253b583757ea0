#pragma once

#include "riskcast/risk.hpp"
#include "riskcast/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace riskcast {

/// Daily breach indicators, aligned 1:1 with the forecast series.
struct BreachSeries {
    std::vector<Date> dates;
    std::vector<std::uint8_t> hit; // 1 = breach
    int n_days() const { return static_cast<int>(hit.size()); }
    int n_breaches() const;
};

/// indicator_t = 1 iff -r_t > var_fraction_t. Forecasts and returns must be
/// date-aligned pairwise; mismatches raise InputError.
BreachSeries count_breaches(const std::vector<RiskForecast>& forecasts,
                            const ReturnSeries& returns);

enum class Zone { green, yellow, red };
const char* to_string(Zone zone);

/// Basel-style zoning generalized past the 250-day table via binomial CDF
/// thresholds: green below 0.95, yellow in [0.95, 0.9999), red at or above
/// 0.9999. Breach counts at or below the expectation N*p stay green.
Zone traffic_light(int breaches, int n_days, double p = 0.01);

struct KupiecResult {
    double lr = 0.0;
    double p_value = 1.0;
    bool reject = false;
};

/// Proportion-of-failures likelihood ratio against chi-square(1); x = 0 and
/// x = N use the 0^0 = 1 limits.
KupiecResult kupiec_pof(int breaches, int n_days, double p = 0.01, double sig = 0.01);

struct ChristoffersenResult {
    double lr = 0.0;
    double p_value = 1.0;
    bool reject = false;
    bool defined = true; // false when there are no breaches or no transitions out of them
};

/// First-order Markov independence test on the breach transition counts.
ChristoffersenResult christoffersen_independence(const BreachSeries& breaches, double sig = 0.01);

enum class MapeDenominator { forecast, actual_return };

struct ErrorMeasures {
    double mae = 0.0;
    double rmse = 0.0;
    double mape = 0.0;  // percent
    double smape = 0.0; // percent
    bool mape_defined = true;
};

/// Forecast errors against realized returns with q_t = -var_fraction_t:
/// MAE, RMSE, MAPE (default denominator |q_t|) and SMAPE. A zero denominator
/// marks MAPE undefined and SMAPE stands in.
ErrorMeasures error_measures(const std::vector<RiskForecast>& forecasts,
                             const ReturnSeries& returns,
                             MapeDenominator denom = MapeDenominator::forecast);

/// Everything the summary tables need for one (model, measure) series.
struct BacktestReport {
    std::string model_id;
    bool stressed = false;
    int n_days = 0;
    int n_breaches = 0;
    Zone zone = Zone::green;
    KupiecResult kupiec;
    ChristoffersenResult christoffersen;
    ErrorMeasures errors;
};

BacktestReport backtest(const std::string& model_id, bool stressed,
                        const std::vector<RiskForecast>& forecasts, const ReturnSeries& returns,
                        double p = 0.01, double sig = 0.01,
                        MapeDenominator denom = MapeDenominator::forecast);

} // namespace riskcast
