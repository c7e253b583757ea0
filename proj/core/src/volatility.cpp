#include "riskcast/volatility.hpp"

#include "riskcast/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace riskcast {

namespace {

constexpr double kRiskMetricsLambda = 0.94;
constexpr double kPenalty = 1e300;
constexpr double kNuLo = 2.1, kNuHi = 100.0;
constexpr double kLogXiBound = 1.6094379124341003; // ln 5 = -ln 0.2
constexpr std::size_t kMinWindow = 250;

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

double map_nu(double t) { return kNuLo + (kNuHi - kNuLo) * logistic(t); }
double unmap_nu(double nu) {
    const double f = std::clamp((nu - kNuLo) / (kNuHi - kNuLo), 1e-9, 1.0 - 1e-9);
    return logit(f);
}
double map_xi(double t) { return std::exp(kLogXiBound * std::tanh(t)); }
double unmap_xi(double xi) {
    const double f = std::clamp(std::log(xi) / kLogXiBound, -1.0 + 1e-12, 1.0 - 1e-12);
    return std::atanh(f);
}

struct Residuals {
    std::vector<double> eps;
    double mu = 0.0;
    double variance = 0.0; // population variance of eps
};

Residuals make_residuals(std::span<const double> window, MeanMode mode) {
    Residuals r;
    r.eps.assign(window.begin(), window.end());
    if (mode == MeanMode::window_mean) {
        double sum = 0;
        for (double v : r.eps) sum += v;
        r.mu = sum / static_cast<double>(r.eps.size());
        for (double& v : r.eps) v -= r.mu;
    }
    double ss = 0;
    for (double v : r.eps) ss += v * v;
    r.variance = ss / static_cast<double>(r.eps.size());
    return r;
}

// Conditional log-likelihood of the residuals under one variance recursion.
// EGARCH runs in the absorbed form ln s2' = omega_abs + beta ln s2 + alpha|z| + gamma z,
// with omega_abs = omega - alpha E|z|, so the likelihood never needs E|z|.
double filter_loglik(VolKind kind, double omega, double alpha, double beta, double gamma,
                     const DensityEvaluator& innovation, const std::vector<double>& eps,
                     double sigma2_init) {
    double sigma2 = sigma2_init;
    double ll = 0.0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        if (!(sigma2 > 1e-300) || !std::isfinite(sigma2)) return -kPenalty;
        const double sigma = std::sqrt(sigma2);
        const double z = eps[t] / sigma;
        ll += innovation.log_density(z) - std::log(sigma);
        switch (kind) {
        case VolKind::arch1:
            sigma2 = omega + alpha * eps[t] * eps[t];
            break;
        case VolKind::garch11:
            sigma2 = omega + alpha * eps[t] * eps[t] + beta * sigma2;
            break;
        case VolKind::egarch11: {
            const double log_s2 = omega + beta * std::log(sigma2) + alpha * std::abs(z) + gamma * z;
            if (std::abs(log_s2) > 120.0) return -kPenalty;
            sigma2 = std::exp(log_s2);
            break;
        }
        case VolKind::riskmetrics:
            sigma2 = kRiskMetricsLambda * sigma2 + (1.0 - kRiskMetricsLambda) * eps[t] * eps[t];
            break;
        }
    }
    if (!std::isfinite(ll)) return -kPenalty;
    return ll;
}

// Same filter, keeping the per-observation variance path.
std::vector<double> filter_path(VolKind kind, double omega, double alpha, double beta,
                                double gamma, const std::vector<double>& eps,
                                double sigma2_init) {
    std::vector<double> path(eps.size());
    double sigma2 = sigma2_init;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        path[t] = sigma2;
        switch (kind) {
        case VolKind::arch1:
            sigma2 = omega + alpha * eps[t] * eps[t];
            break;
        case VolKind::garch11:
            sigma2 = omega + alpha * eps[t] * eps[t] + beta * sigma2;
            break;
        case VolKind::egarch11: {
            const double z = eps[t] / std::sqrt(path[t]);
            sigma2 = std::exp(omega + beta * std::log(path[t]) + alpha * std::abs(z) + gamma * z);
            break;
        }
        case VolKind::riskmetrics:
            sigma2 = kRiskMetricsLambda * sigma2 + (1.0 - kRiskMetricsLambda) * eps[t] * eps[t];
            break;
        }
    }
    return path;
}

struct Decoded {
    double omega = 0, alpha = 0, beta = 0, gamma = 0; // egarch omega is the absorbed form
    double nu = 8.0, xi = 1.0;
    bool valid = true;
};

int vol_param_count(VolKind kind) {
    switch (kind) {
    case VolKind::arch1: return 2;
    case VolKind::garch11: return 3;
    case VolKind::egarch11: return 4;
    case VolKind::riskmetrics: return 0;
    }
    return 0;
}

Decoded decode(VolKind kind, bool fit_skewt, const std::vector<double>& theta) {
    Decoded d;
    for (double t : theta)
        if (!std::isfinite(t)) {
            d.valid = false;
            return d;
        }
    std::size_t i = 0;
    switch (kind) {
    case VolKind::arch1:
        d.omega = std::exp(theta[i++]);
        d.alpha = std::exp(theta[i++]);
        break;
    case VolKind::garch11: {
        d.omega = std::exp(theta[i++]);
        const double s = logistic(theta[i++]);
        const double f = logistic(theta[i++]);
        d.alpha = s * f;
        d.beta = s * (1.0 - f);
        break;
    }
    case VolKind::egarch11:
        d.omega = theta[i++];
        d.beta = std::tanh(theta[i++]);
        d.alpha = theta[i++];
        d.gamma = theta[i++];
        break;
    case VolKind::riskmetrics:
        break;
    }
    if (fit_skewt) {
        d.nu = map_nu(theta[i++]);
        d.xi = map_xi(theta[i++]);
    }
    if (kind == VolKind::arch1 || kind == VolKind::garch11)
        if (!std::isfinite(d.omega) || !(d.omega > 0.0)) d.valid = false;
    return d;
}

std::vector<double> default_start(VolKind kind, bool fit_skewt, double variance) {
    std::vector<double> theta;
    switch (kind) {
    case VolKind::arch1:
        theta = {std::log(0.9 * variance), std::log(0.10)};
        break;
    case VolKind::garch11:
        theta = {std::log(0.02 * variance), logit(0.98), logit(0.08 / 0.98)};
        break;
    case VolKind::egarch11: {
        const double beta = 0.96, alpha = 0.12, gamma = -0.05;
        const double c0 = std::sqrt(2.0 / M_PI);
        const double omega_abs = (1.0 - beta) * std::log(variance) - alpha * c0;
        theta = {omega_abs, std::atanh(beta), alpha, gamma};
        break;
    }
    case VolKind::riskmetrics:
        break;
    }
    if (fit_skewt) {
        theta.push_back(unmap_nu(8.0));
        theta.push_back(unmap_xi(1.0));
    }
    return theta;
}

std::vector<double> encode_warm(VolKind kind, bool fit_skewt, const VolParams& p,
                                double variance) {
    auto guard = [&](bool ok) { return ok; };
    std::vector<double> theta;
    switch (kind) {
    case VolKind::arch1:
        if (!guard(p.omega > 0 && p.alpha > 0)) return {};
        theta = {std::log(p.omega), std::log(p.alpha)};
        break;
    case VolKind::garch11: {
        const double s = p.alpha + p.beta;
        if (!guard(p.omega > 0 && p.alpha > 0 && p.beta > 0 && s < 1)) return {};
        theta = {std::log(p.omega), logit(s), logit(p.alpha / s)};
        break;
    }
    case VolKind::egarch11: {
        if (!guard(std::abs(p.beta) < 1)) return {};
        const double c = expected_abs(p.nu > 2 ? InnovationDist::skewed_t(p.nu, p.xi)
                                               : InnovationDist::normal());
        theta = {p.omega - p.alpha * c, std::atanh(p.beta), p.alpha, p.gamma};
        break;
    }
    case VolKind::riskmetrics:
        break;
    }
    if (fit_skewt) {
        if (!(p.nu > kNuLo && p.nu <= kNuHi && p.xi >= 0.2 && p.xi <= 5.0)) {
            theta.push_back(unmap_nu(8.0));
            theta.push_back(unmap_xi(1.0));
        } else {
            theta.push_back(unmap_nu(p.nu));
            theta.push_back(unmap_xi(p.xi));
        }
    }
    (void)variance;
    return theta;
}

} // namespace

const char* to_string(VolKind kind) {
    switch (kind) {
    case VolKind::arch1: return "arch1";
    case VolKind::garch11: return "garch11";
    case VolKind::egarch11: return "egarch11";
    case VolKind::riskmetrics: return "riskmetrics";
    }
    return "?";
}

InnovationDist FittedVolModel::innovation() const {
    if (spec.innovation == DistKind::normal) return InnovationDist::normal();
    return InnovationDist::skewed_t(params.nu, params.xi);
}

FittedVolModel fit(const VolModelSpec& spec, std::span<const double> window,
                   const FitOptions& options) {
    if (window.size() < kMinWindow)
        throw DomainError("fit: window shorter than " + std::to_string(kMinWindow));
    for (double v : window)
        if (!std::isfinite(v)) throw DomainError("fit: non-finite return in window");

    const Residuals res = make_residuals(window, options.mean_mode);
    if (!(res.variance > 1e-18)) throw DomainError("fit: degenerate window (zero variance)");
    {
        // A constant window is degenerate whatever the mean mode.
        double mean = 0;
        for (double v : window) mean += v;
        mean /= static_cast<double>(window.size());
        double centered = 0;
        for (double v : window) centered += (v - mean) * (v - mean);
        if (!(centered / static_cast<double>(window.size()) > 1e-18))
            throw DomainError("fit: degenerate window (constant returns)");
    }

    const bool skewt = spec.innovation == DistKind::skewed_t;
    const bool fit_dist = skewt && !options.fixed_skewt.has_value();
    const double fixed_nu = options.fixed_skewt ? options.fixed_skewt->first : 0.0;
    const double fixed_xi = options.fixed_skewt ? options.fixed_skewt->second : 1.0;

    auto finalize = [&](const Decoded& d, double ll, bool converged) {
        FittedVolModel m;
        m.spec = spec;
        m.params.mu = res.mu;
        m.converged = converged;
        m.loglik = ll;
        if (skewt) {
            m.params.nu = fit_dist ? d.nu : fixed_nu;
            m.params.xi = fit_dist ? d.xi : fixed_xi;
        }
        double omega = d.omega;
        if (spec.kind == VolKind::egarch11) {
            // Undo the absorbed E|z| centering so reported parameters match
            // the ln-variance recursion with the centered |z| term.
            const double c = expected_abs(m.innovation());
            omega = d.omega + d.alpha * c;
        }
        m.params.omega = omega;
        m.params.alpha = d.alpha;
        m.params.beta = d.beta;
        m.params.gamma = d.gamma;
        if (spec.kind == VolKind::riskmetrics) m.params.lambda = kRiskMetricsLambda;

        // filter_path runs EGARCH in the absorbed-omega form.
        const std::vector<double> path =
            filter_path(spec.kind, d.omega, d.alpha, d.beta, d.gamma, res.eps, res.variance);
        m.state.sigma2 = path.back();
        m.state.eps = res.eps.back();
        return m;
    };

    if (spec.kind == VolKind::riskmetrics && spec.innovation == DistKind::normal) {
        const DensityEvaluator innovation(InnovationDist::normal());
        Decoded d;
        const double ll =
            filter_loglik(spec.kind, 0, 0, 0, 0, innovation, res.eps, res.variance);
        return finalize(d, ll, true);
    }

    const int n_vol = spec.kind == VolKind::riskmetrics ? 0 : vol_param_count(spec.kind);
    const int dim = n_vol + (fit_dist ? 2 : 0);

    auto objective = [&](const std::vector<double>& theta) {
        const Decoded d = decode(spec.kind, fit_dist, theta);
        if (!d.valid) return kPenalty;
        const InnovationDist innov = skewt
                                         ? InnovationDist::skewed_t(fit_dist ? d.nu : fixed_nu,
                                                                    fit_dist ? d.xi : fixed_xi)
                                         : InnovationDist::normal();
        const DensityEvaluator ev(innov);
        const double ll =
            filter_loglik(spec.kind, d.omega, d.alpha, d.beta, d.gamma, ev, res.eps, res.variance);
        return -ll;
    };

    if (dim == 0) { // riskmetrics with fixed skew-t parameters
        Decoded d;
        d.nu = fixed_nu;
        d.xi = fixed_xi;
        const DensityEvaluator ev(InnovationDist::skewed_t(fixed_nu, fixed_xi));
        const double ll =
            filter_loglik(spec.kind, 0, 0, 0, 0, ev, res.eps, res.variance);
        return finalize(d, ll, true);
    }

    std::vector<double> start;
    if (options.warm_start)
        start = encode_warm(spec.kind, fit_dist, *options.warm_start, res.variance);
    if (static_cast<int>(start.size()) != dim) start = default_start(spec.kind, fit_dist, res.variance);

    NelderMeadOptions nm;
    nm.f_tolerance = options.f_tolerance;
    nm.max_evaluations = options.max_evaluations;
    // Rolling one-day window shifts barely move the optimum; a tight simplex
    // around a warm start converges in a fraction of the evaluations.
    if (options.warm_start && static_cast<int>(start.size()) == dim) nm.initial_step = 0.08;

    NelderMeadResult best;
    best.f = kPenalty;
    bool any_converged = false;
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> jitter(0.0, 0.5);

    for (int attempt = 0; attempt <= options.restarts; ++attempt) {
        std::vector<double> s = start;
        if (attempt > 0)
            for (double& v : s) v += jitter(rng);
        const NelderMeadResult r = nelder_mead(objective, s, nm);
        if (r.f < best.f || best.x.empty()) best = r;
        if (r.converged) {
            any_converged = true;
            break;
        }
    }

    const Decoded d = decode(spec.kind, fit_dist, best.x);
    FittedVolModel model = finalize(d, -best.f, any_converged);
    if (!any_converged)
        throw CalibrationError("fit: optimizer failed to converge for " +
                                   std::string(to_string(spec.kind)),
                               model);
    return model;
}

double forecast_variance(const FittedVolModel& model) {
    const auto& p = model.params;
    const auto& st = model.state;
    if (!(st.sigma2 > 0) || !std::isfinite(st.sigma2))
        throw DomainError("forecast_variance: invalid filtered state");
    double next = 0;
    switch (model.spec.kind) {
    case VolKind::arch1:
        next = p.omega + p.alpha * st.eps * st.eps;
        break;
    case VolKind::garch11:
        next = p.omega + p.alpha * st.eps * st.eps + p.beta * st.sigma2;
        break;
    case VolKind::egarch11: {
        const double z = st.eps / std::sqrt(st.sigma2);
        const double c = expected_abs(model.innovation());
        next = std::exp(p.omega + p.beta * std::log(st.sigma2) +
                        p.alpha * (std::abs(z) - c) + p.gamma * z);
        break;
    }
    case VolKind::riskmetrics:
        next = p.lambda * st.sigma2 + (1.0 - p.lambda) * st.eps * st.eps;
        break;
    }
    return next;
}

double long_run_volatility(const FittedVolModel& model) {
    if (model.spec.kind != VolKind::garch11)
        throw UnsupportedError("long_run_volatility is defined for GARCH(1,1) only");
    const auto& p = model.params;
    return std::sqrt(p.omega / (1.0 - p.alpha - p.beta));
}

std::vector<double> filter_variances(const VolModelSpec& spec, const VolParams& params,
                                     std::span<const double> window,
                                     std::optional<double> sigma2_init, MeanMode mean_mode) {
    const Residuals res = make_residuals(window, mean_mode);
    double omega = params.omega;
    if (spec.kind == VolKind::egarch11) {
        const InnovationDist innov = spec.innovation == DistKind::skewed_t
                                         ? InnovationDist::skewed_t(params.nu, params.xi)
                                         : InnovationDist::normal();
        omega = params.omega - params.alpha * expected_abs(innov);
    }
    return filter_path(spec.kind, omega, params.alpha, params.beta, params.gamma, res.eps,
                       sigma2_init.value_or(res.variance));
}

double window_loglik(const VolModelSpec& spec, const VolParams& params,
                     std::span<const double> window, MeanMode mean_mode) {
    const Residuals res = make_residuals(window, mean_mode);
    const InnovationDist innov = spec.innovation == DistKind::skewed_t
                                     ? InnovationDist::skewed_t(params.nu, params.xi)
                                     : InnovationDist::normal();
    const DensityEvaluator ev(innov);
    double omega = params.omega;
    if (spec.kind == VolKind::egarch11) omega = params.omega - params.alpha * expected_abs(innov);
    return filter_loglik(spec.kind, omega, params.alpha, params.beta, params.gamma, ev, res.eps,
                         res.variance);
}

VolParams fit_standard_errors(const FittedVolModel& model, std::span<const double> window,
                              MeanMode mean_mode) {
    const VolKind kind = model.spec.kind;
    const bool skewt = model.spec.innovation == DistKind::skewed_t;

    std::vector<double> p0;
    std::vector<int> which; // 0 omega, 1 alpha, 2 beta, 3 gamma, 4 nu, 5 xi
    switch (kind) {
    case VolKind::arch1:
        p0 = {model.params.omega, model.params.alpha};
        which = {0, 1};
        break;
    case VolKind::garch11:
        p0 = {model.params.omega, model.params.alpha, model.params.beta};
        which = {0, 1, 2};
        break;
    case VolKind::egarch11:
        p0 = {model.params.omega, model.params.beta, model.params.alpha, model.params.gamma};
        which = {0, 2, 1, 3};
        break;
    case VolKind::riskmetrics:
        break;
    }
    if (skewt) {
        p0.push_back(model.params.nu);
        which.push_back(4);
        p0.push_back(model.params.xi);
        which.push_back(5);
    }
    const std::size_t n = p0.size();
    VolParams out;
    out.omega = out.alpha = out.beta = out.gamma = out.nu = out.xi =
        std::numeric_limits<double>::quiet_NaN();
    if (n == 0) return out;

    auto nll = [&](const std::vector<double>& p) {
        VolParams vp = model.params;
        for (std::size_t i = 0; i < n; ++i) {
            switch (which[i]) {
            case 0: vp.omega = p[i]; break;
            case 1: vp.alpha = p[i]; break;
            case 2: vp.beta = p[i]; break;
            case 3: vp.gamma = p[i]; break;
            case 4: vp.nu = p[i]; break;
            case 5: vp.xi = p[i]; break;
            }
        }
        if (kind != VolKind::egarch11 && !(vp.omega > 0)) return kPenalty;
        if (kind == VolKind::garch11 && !(vp.alpha > 0 && vp.beta > 0 && vp.alpha + vp.beta < 1))
            return kPenalty;
        if (skewt && !(vp.nu > 2.0 && vp.xi > 0)) return kPenalty;
        return -window_loglik(model.spec, vp, window, mean_mode);
    };

    Eigen::MatrixXd hess(n, n);
    std::vector<double> step(n);
    for (std::size_t i = 0; i < n; ++i) step[i] = std::max(1e-5 * std::abs(p0[i]), 1e-7);
    const double f0 = nll(p0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            auto shifted = [&](double di, double dj) {
                std::vector<double> p = p0;
                p[i] += di;
                p[j] += dj;
                return nll(p);
            };
            double h;
            if (i == j) {
                h = (shifted(step[i], 0) - 2.0 * f0 + shifted(-step[i], 0)) / (step[i] * step[i]);
            } else {
                h = (shifted(step[i], step[j]) - shifted(step[i], -step[j]) -
                     shifted(-step[i], step[j]) + shifted(-step[i], -step[j])) /
                    (4.0 * step[i] * step[j]);
            }
            hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h;
            hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = h;
        }
    }

    const Eigen::MatrixXd cov = hess.fullPivLu().inverse();
    auto assign = [&](std::size_t i, double se) {
        switch (which[i]) {
        case 0: out.omega = se; break;
        case 1: out.alpha = se; break;
        case 2: out.beta = se; break;
        case 3: out.gamma = se; break;
        case 4: out.nu = se; break;
        case 5: out.xi = se; break;
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        assign(i, v > 0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

} // namespace riskcast
