#include "riskcast/distributions.hpp"

#include "riskcast/errors.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace riskcast {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

// Unit-variance symmetric Student t ("standardized t"): the raw t with nu
// degrees of freedom rescaled by sqrt((nu-2)/nu).
struct BaseT {
    double nu;
    double log_norm; // log of the density normalization constant

    explicit BaseT(double nu_) : nu(nu_) {
        log_norm = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                   0.5 * std::log(M_PI * (nu - 2.0));
    }
    double log_pdf(double z) const {
        return log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / (nu - 2.0));
    }
    double cdf(double z) const {
        boost::math::students_t_distribution<double> t(nu);
        return boost::math::cdf(t, z * std::sqrt(nu / (nu - 2.0)));
    }
    double quantile(double p) const {
        boost::math::students_t_distribution<double> t(nu);
        return boost::math::quantile(t, p) * std::sqrt((nu - 2.0) / nu);
    }
    // E|Z| = 2*sqrt(nu-2)*Gamma((nu+1)/2) / (sqrt(pi)*(nu-1)*Gamma(nu/2))
    double expected_abs() const {
        return 2.0 * std::sqrt(nu - 2.0) *
               std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) /
               (std::sqrt(M_PI) * (nu - 1.0));
    }
};

// Standardization constants of the two-piece skew construction: U has the
// half-scaled density; Z = (U - m) / s has mean 0 and variance 1.
struct SkewConsts {
    double m, s, log_halves; // log_halves = log(2/(xi + 1/xi))
};

SkewConsts skew_consts(const BaseT& base, double xi) {
    const double m1 = base.expected_abs();
    const double m = m1 * (xi - 1.0 / xi);
    const double ex2 = xi * xi + 1.0 / (xi * xi) - 1.0; // E[U^2] with unit-variance base
    const double s2 = ex2 - m * m;
    return {m, std::sqrt(s2), std::log(2.0 / (xi + 1.0 / xi))};
}

double skew_log_pdf(const BaseT& base, const SkewConsts& c, double xi, double z) {
    const double u = c.s * z + c.m;
    const double arg = u >= 0.0 ? u / xi : u * xi;
    return c.log_halves + std::log(c.s) + base.log_pdf(arg);
}

double skew_cdf(const BaseT& base, const SkewConsts& c, double xi, double z) {
    const double u = c.s * z + c.m;
    const double xi2 = xi * xi;
    if (u < 0.0) return (2.0 / (xi2 + 1.0)) * base.cdf(u * xi);
    return 1.0 / (1.0 + xi2) + (2.0 * xi2 / (1.0 + xi2)) * (base.cdf(u / xi) - 0.5);
}

// Piecewise closed-form inverse of skew_cdf via the base quantile; used to
// seed the bracket for the root-finder below.
double skew_quantile_seed(const BaseT& base, const SkewConsts& c, double xi, double p) {
    const double xi2 = xi * xi;
    const double split = 1.0 / (1.0 + xi2); // P(U <= 0)
    double u;
    if (p < split) {
        u = base.quantile(p * (xi2 + 1.0) / 2.0) / xi;
    } else {
        u = base.quantile((p - split) * (1.0 + xi2) / (2.0 * xi2) + 0.5) * xi;
    }
    return (u - c.m) / c.s;
}

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const auto& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) < 15.0 * tol) return left + right + err / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const auto& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

void validate(const InnovationDist& d) {
    if (d.kind == DistKind::skewed_t) {
        if (!(d.nu > 2.0)) throw DomainError("skewed-t requires nu > 2 for finite variance");
        if (!(d.xi > 0.0)) throw DomainError("skewed-t requires xi > 0");
    }
}

} // namespace

InnovationDist InnovationDist::skewed_t(double nu, double xi) {
    InnovationDist d{DistKind::skewed_t, nu, xi};
    validate(d);
    return d;
}

DensityEvaluator::DensityEvaluator(const InnovationDist& dist) : kind_(dist.kind) {
    validate(dist);
    if (kind_ == DistKind::normal) return;
    nu_ = dist.nu;
    xi_ = dist.xi;
    const BaseT base(nu_);
    const SkewConsts c = skew_consts(base, xi_);
    base_log_norm_ = base.log_norm;
    m_ = c.m;
    s_ = c.s;
    log_halves_s_ = c.log_halves + std::log(c.s);
}

double DensityEvaluator::log_density(double z) const {
    if (kind_ == DistKind::normal) return -0.5 * (kLogTwoPi + z * z);
    const double u = s_ * z + m_;
    const double arg = u >= 0.0 ? u / xi_ : u * xi_;
    return log_halves_s_ + base_log_norm_ -
           0.5 * (nu_ + 1.0) * std::log1p(arg * arg / (nu_ - 2.0));
}

double log_density(const InnovationDist& dist, double z) {
    validate(dist);
    if (dist.kind == DistKind::normal) return -0.5 * (kLogTwoPi + z * z);
    const BaseT base(dist.nu);
    const SkewConsts c = skew_consts(base, dist.xi);
    return skew_log_pdf(base, c, dist.xi, z);
}

double density(const InnovationDist& dist, double z) { return std::exp(log_density(dist, z)); }

double cdf(const InnovationDist& dist, double z) {
    validate(dist);
    if (dist.kind == DistKind::normal) {
        boost::math::normal_distribution<double> n;
        return boost::math::cdf(n, z);
    }
    const BaseT base(dist.nu);
    const SkewConsts c = skew_consts(base, dist.xi);
    return skew_cdf(base, c, dist.xi, z);
}

double quantile(const InnovationDist& dist, double p) {
    validate(dist);
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must lie in (0,1)");
    if (dist.kind == DistKind::normal) {
        boost::math::normal_distribution<double> n;
        return boost::math::quantile(n, p);
    }
    const BaseT base(dist.nu);
    const SkewConsts c = skew_consts(base, dist.xi);
    const auto F = [&](double z) { return skew_cdf(base, c, dist.xi, z); };

    // Bracket around the closed-form seed, then bisect the CDF.
    const double seed = skew_quantile_seed(base, c, dist.xi, p);
    double step = std::max(1e-8, 1e-8 * std::abs(seed));
    double lo = seed - step, hi = seed + step;
    while (F(lo) > p) {
        step *= 4.0;
        lo -= step;
    }
    while (F(hi) < p) {
        step *= 4.0;
        hi += step;
    }
    constexpr double kTol = 1e-10;
    for (int it = 0; it < 200 && hi - lo > 0.25 * kTol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double expected_abs(const InnovationDist& dist) {
    validate(dist);
    if (dist.kind == DistKind::normal) return std::sqrt(2.0 / M_PI);

    static std::mutex cache_mutex;
    static std::map<std::pair<double, double>, double> cache;
    {
        std::lock_guard lock(cache_mutex);
        const auto it = cache.find({dist.nu, dist.xi});
        if (it != cache.end()) return it->second;
    }

    const BaseT base(dist.nu);
    const SkewConsts c = skew_consts(base, dist.xi);
    const auto f = [&](double z) {
        return std::abs(z) * std::exp(skew_log_pdf(base, c, dist.xi, z));
    };
    // |z| f(z) decays like |z|^-nu: integrate a central window directly and the
    // tails with the u = 1/z substitution, which maps them to finite integrals.
    const auto tail = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double z = 1.0 / u;
        return (f(z) + f(-z)) * z * z;
    };
    constexpr double kTol = 1e-10;
    const double value = integrate(f, -8.0, 8.0, kTol) + integrate(tail, 0.0, 0.125, kTol);

    std::lock_guard lock(cache_mutex);
    cache.emplace(std::make_pair(dist.nu, dist.xi), value);
    return value;
}

} // namespace riskcast
