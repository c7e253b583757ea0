#pragma once

#include "riskcast/series.hpp"
#include "riskcast/volatility.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace riskcast {

/// Row-level quality flags carried next to a forecast.
enum ForecastFlag : std::uint8_t {
    flag_none = 0,
    flag_nonpositive_var = 1,  // degenerate window produced a non-positive VaR fraction
    flag_nonconverged = 2,     // calibration did not converge; best iterate used
    flag_carried_forward = 4,  // model failed on the date; previous forecast reused
};

/// One dated VaR or SVaR figure, quoted as a positive loss fraction of
/// portfolio value (multiplying by the portfolio level is the caller's step).
struct RiskForecast {
    Date date;
    std::string model_id;
    int horizon_days = 10;
    double confidence = 0.99;
    double var_fraction = 0.0;
    bool stressed = false;
    std::uint8_t flags = flag_none;
};

/// Historical-simulation VaR: the k-th smallest window return with k =
/// ceil(alpha*N), sign-flipped. Degenerate all-positive windows surface a
/// non-positive value as-is (callers flag it). Window must have N >= 100.
double hs_var(std::span<const double> window, double alpha = 0.01);

/// Normal-quantile VaR from the window's zero-mean sample deviation.
double delta_normal_var(std::span<const double> window, double alpha = 0.01);

/// -quantile(innovation, alpha) * sqrt(one-day-ahead variance).
double parametric_var(const FittedVolModel& model, double alpha = 0.01);

/// Square-root-of-time scaling of a one-day loss fraction.
double scale_to_horizon(double var_1d, int horizon_days);

/// Collated stressed period: the `length` worst returns of the candidate pool,
/// re-ordered chronologically. Ties select the earlier date; the optional
/// extra (forecast) return counts as the latest candidate and sits last.
struct StressedWindow {
    Date source_first, source_last; // span of the candidate history
    std::vector<ReturnPoint> members;
    bool extra_selected = false;

    std::vector<double> values() const;
};

StressedWindow stressed_window(const ReturnSeries& history, std::size_t length,
                               std::optional<double> extra_forecast = std::nullopt,
                               std::optional<Date> extra_date = std::nullopt);

/// Historical simulation over the union of trailing returns and one forecast
/// return, per the one-step-injection scheme.
double bn_var(std::span<const double> historical, double forecast_return, double alpha = 0.01);

} // namespace riskcast
