#include "riskcast/risk.hpp"

#include "riskcast/distributions.hpp"
#include "riskcast/errors.hpp"

#include <algorithm>
#include <cmath>

namespace riskcast {

double hs_var(std::span<const double> window, double alpha) {
    const std::size_t n = window.size();
    if (n < 100) throw DomainError("hs_var: window shorter than 100");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("hs_var: alpha outside (0,1)");
    const std::size_t k =
        static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
    std::vector<double> scratch(window.begin(), window.end());
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     scratch.end());
    return -scratch[k - 1];
}

double delta_normal_var(std::span<const double> window, double alpha) {
    const std::size_t n = window.size();
    if (n < 100) throw DomainError("delta_normal_var: window shorter than 100");
    double ss = 0.0;
    for (double r : window) ss += r * r;
    const double s = std::sqrt(ss / static_cast<double>(n));
    if (!(s > 0.0)) throw DomainError("delta_normal_var: zero-variance window");
    return -quantile(InnovationDist::normal(), alpha) * s;
}

double parametric_var(const FittedVolModel& model, double alpha) {
    const double sigma = std::sqrt(forecast_variance(model));
    return -quantile(model.innovation(), alpha) * sigma;
}

double scale_to_horizon(double var_1d, int horizon_days) {
    return var_1d * std::sqrt(static_cast<double>(horizon_days));
}

std::vector<double> StressedWindow::values() const {
    std::vector<double> out(members.size());
    std::transform(members.begin(), members.end(), out.begin(),
                   [](const ReturnPoint& p) { return p.value; });
    return out;
}

StressedWindow stressed_window(const ReturnSeries& history, std::size_t length,
                               std::optional<double> extra_forecast,
                               std::optional<Date> extra_date) {
    const std::size_t pool = history.size() + (extra_forecast ? 1 : 0);
    if (pool < length)
        throw DomainError("stressed_window: candidate pool smaller than requested length");
    if (history.empty()) throw DomainError("stressed_window: empty history");

    // Rank candidates by (value, date); the forecast return counts as the
    // latest date so existing history wins ties.
    std::vector<std::size_t> idx(history.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    const std::size_t extra_index = history.size();
    if (extra_forecast) idx.push_back(extra_index);

    auto value_of = [&](std::size_t i) {
        return i == extra_index ? *extra_forecast : history[i].value;
    };
    auto worse = [&](std::size_t a, std::size_t b) {
        const double va = value_of(a), vb = value_of(b);
        if (va != vb) return va < vb;
        return a < b; // history indices are chronological; extra sorts last
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(length - 1),
                     idx.end(), worse);
    idx.resize(length);
    std::sort(idx.begin(), idx.end()); // chronological member order, extra last

    StressedWindow w;
    w.source_first = history[0].date;
    w.source_last = history[history.size() - 1].date;
    w.members.reserve(length);
    for (std::size_t i : idx) {
        if (i == extra_index) {
            w.extra_selected = true;
            const Date d = extra_date.value_or(w.source_last.next_day());
            w.members.push_back({d, *extra_forecast});
        } else {
            w.members.push_back(history[i]);
        }
    }
    return w;
}

double bn_var(std::span<const double> historical, double forecast_return, double alpha) {
    std::vector<double> pool(historical.begin(), historical.end());
    pool.push_back(forecast_return);
    return hs_var(pool, alpha);
}

} // namespace riskcast
