#include "riskcast/evaluation.hpp"

#include "riskcast/errors.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>

namespace riskcast {

namespace {

double chi2_sf_1(double x) {
    boost::math::chi_squared_distribution<double> chi2(1.0);
    return boost::math::cdf(boost::math::complement(chi2, x));
}

} // namespace

int BreachSeries::n_breaches() const {
    return std::accumulate(hit.begin(), hit.end(), 0, [](int a, std::uint8_t b) { return a + b; });
}

const char* to_string(Zone zone) {
    switch (zone) {
    case Zone::green: return "green";
    case Zone::yellow: return "yellow";
    case Zone::red: return "red";
    }
    return "?";
}

BreachSeries count_breaches(const std::vector<RiskForecast>& forecasts,
                            const ReturnSeries& returns) {
    if (forecasts.size() != returns.size())
        throw InputError("count_breaches: forecast and return series lengths differ");
    BreachSeries out;
    out.dates.reserve(forecasts.size());
    out.hit.reserve(forecasts.size());
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        if (forecasts[i].date != returns[i].date)
            throw InputError("count_breaches: date mismatch at " + returns[i].date.to_string());
        out.dates.push_back(forecasts[i].date);
        out.hit.push_back(-returns[i].value > forecasts[i].var_fraction ? 1 : 0);
    }
    return out;
}

Zone traffic_light(int breaches, int n_days, double p) {
    if (breaches < 0 || breaches > n_days) throw DomainError("traffic_light: breaches outside [0,N]");
    // At or below the expected count the model cannot be flagged for excess
    // breaches; this also keeps x = 0 green at any N.
    if (static_cast<double>(breaches) <= static_cast<double>(n_days) * p) return Zone::green;
    boost::math::binomial_distribution<double> bin(static_cast<double>(n_days), p);
    const double cum = boost::math::cdf(bin, static_cast<double>(breaches));
    if (cum < 0.95) return Zone::green;
    if (cum < 0.9999) return Zone::yellow;
    return Zone::red;
}

KupiecResult kupiec_pof(int breaches, int n_days, double p, double sig) {
    if (breaches < 0 || breaches > n_days) throw DomainError("kupiec_pof: breaches outside [0,N]");
    const double x = breaches, n = n_days;
    double log_null = 0.0, log_alt = 0.0;
    // x*ln(x/N) -> 0 as x -> 0 and (N-x)*ln(1-x/N) -> 0 as x -> N.
    log_null = (n - x) * std::log1p(-p) + x * std::log(p);
    if (breaches > 0) log_alt += x * std::log(x / n);
    if (breaches < n_days) log_alt += (n - x) * std::log1p(-x / n);
    KupiecResult r;
    r.lr = std::max(0.0, -2.0 * (log_null - log_alt));
    r.p_value = chi2_sf_1(r.lr);
    r.reject = r.p_value < sig;
    return r;
}

ChristoffersenResult christoffersen_independence(const BreachSeries& breaches, double sig) {
    ChristoffersenResult r;
    const auto& h = breaches.hit;
    if (h.size() < 2 || breaches.n_breaches() == 0) {
        r.defined = false;
        return r;
    }
    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t t = 1; t < h.size(); ++t) {
        if (h[t - 1]) {
            (h[t] ? n11 : n10) += 1;
        } else {
            (h[t] ? n01 : n00) += 1;
        }
    }
    const double from0 = n00 + n01, from1 = n10 + n11;
    if (from1 == 0 || from0 == 0) {
        // A lone breach at the series end (or a degenerate all-breach prefix)
        // gives no transition information.
        r.defined = false;
        return r;
    }
    const double pi = (n01 + n11) / (from0 + from1);
    const double pi01 = n01 / from0;
    const double pi11 = n11 / from1;
    auto xlogy = [](double x, double y) { return x > 0 ? x * std::log(y) : 0.0; };
    const double log_null = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
    const double log_alt = xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) +
                           xlogy(n11, pi11);
    r.lr = std::max(0.0, -2.0 * (log_null - log_alt));
    r.p_value = chi2_sf_1(r.lr);
    r.reject = r.p_value < sig;
    return r;
}

ErrorMeasures error_measures(const std::vector<RiskForecast>& forecasts,
                             const ReturnSeries& returns, MapeDenominator denom) {
    if (forecasts.size() != returns.size())
        throw InputError("error_measures: forecast and return series lengths differ");
    if (forecasts.empty()) throw InputError("error_measures: empty series");
    ErrorMeasures m;
    double abs_sum = 0, sq_sum = 0, mape_sum = 0, smape_sum = 0;
    const double n = static_cast<double>(forecasts.size());
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        if (forecasts[i].date != returns[i].date)
            throw InputError("error_measures: date mismatch at " + returns[i].date.to_string());
        const double q = -forecasts[i].var_fraction; // forecast as a return threshold
        const double r = returns[i].value;
        const double e = r - q;
        abs_sum += std::abs(e);
        sq_sum += e * e;
        const double d = denom == MapeDenominator::forecast ? std::abs(q) : std::abs(r);
        if (d == 0.0)
            m.mape_defined = false;
        else
            mape_sum += std::abs(e) / d;
        const double sd = std::abs(r) + std::abs(q);
        smape_sum += sd == 0.0 ? 0.0 : 2.0 * std::abs(e) / sd;
    }
    m.mae = abs_sum / n;
    m.rmse = std::sqrt(sq_sum / n);
    m.smape = 100.0 * smape_sum / n;
    m.mape = m.mape_defined ? 100.0 * mape_sum / n : m.smape;
    return m;
}

BacktestReport backtest(const std::string& model_id, bool stressed,
                        const std::vector<RiskForecast>& forecasts, const ReturnSeries& returns,
                        double p, double sig, MapeDenominator denom) {
    BacktestReport rep;
    rep.model_id = model_id;
    rep.stressed = stressed;
    const BreachSeries breaches = count_breaches(forecasts, returns);
    rep.n_days = breaches.n_days();
    rep.n_breaches = breaches.n_breaches();
    rep.zone = traffic_light(rep.n_breaches, rep.n_days, p);
    rep.kupiec = kupiec_pof(rep.n_breaches, rep.n_days, p, sig);
    rep.christoffersen = christoffersen_independence(breaches, sig);
    rep.errors = error_measures(forecasts, returns, denom);
    return rep;
}

} // namespace riskcast
