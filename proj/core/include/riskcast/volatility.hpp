#pragma once

#include "riskcast/distributions.hpp"
#include "riskcast/errors.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace riskcast {

enum class VolKind { arch1, garch11, egarch11, riskmetrics };

const char* to_string(VolKind kind);

struct VolModelSpec {
    VolKind kind = VolKind::garch11;
    DistKind innovation = DistKind::normal;
};

/// How the residual is formed from the raw return.
enum class MeanMode { zero, window_mean };

/// Named parameters; only the fields a model kind uses are meaningful.
struct VolParams {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double lambda = 0.0; // riskmetrics smoothing constant, fixed at 0.94
    double nu = 0.0;     // skewed-t degrees of freedom
    double xi = 1.0;     // skewed-t asymmetry
    double mu = 0.0;     // residual mean subtracted from returns
};

struct FilteredState {
    double sigma2 = 0.0; // conditional variance at the window end
    double eps = 0.0;    // last residual
};

struct FittedVolModel {
    VolModelSpec spec;
    VolParams params;
    double loglik = 0.0;
    FilteredState state;
    bool converged = true;

    InnovationDist innovation() const;
};

struct FitOptions {
    MeanMode mean_mode = MeanMode::zero;
    double f_tolerance = 1e-8; // convergence: successive log-likelihoods within this
    int max_evaluations = 2000;
    int restarts = 3; // jittered restarts after a failed attempt
    std::uint64_t seed = 0;
    std::optional<VolParams> warm_start;
    /// When set, the skewed-t (nu, xi) are held fixed instead of estimated.
    std::optional<std::pair<double, double>> fixed_skewt;
};

/// Optimizer failure; carries the best iterate found so callers can degrade
/// gracefully on long runs.
class CalibrationError : public Error {
public:
    CalibrationError(const std::string& message, FittedVolModel best)
        : Error(message), best_iterate(std::move(best)) {}
    FittedVolModel best_iterate;
};

/// Maximum-likelihood calibration over a return window (length >= 250).
/// RiskMetrics only filters; with a skewed-t innovation its (nu, xi) are
/// estimated on the filtered residuals. Constant windows raise DomainError.
FittedVolModel fit(const VolModelSpec& spec, std::span<const double> window,
                   const FitOptions& options = {});

/// One-day-ahead conditional variance from the filtered state.
double forecast_variance(const FittedVolModel& model);

/// sqrt(omega / (1 - alpha - beta)); GARCH(1,1) only.
double long_run_volatility(const FittedVolModel& model);

/// Conditional-variance path along the window (sigma2_0 = sample variance of
/// the residuals unless overridden). Exposed for audit and tests.
std::vector<double> filter_variances(const VolModelSpec& spec, const VolParams& params,
                                     std::span<const double> window,
                                     std::optional<double> sigma2_init = std::nullopt,
                                     MeanMode mean_mode = MeanMode::zero);

/// Total conditional log-likelihood of the window under the given parameters.
double window_loglik(const VolModelSpec& spec, const VolParams& params,
                     std::span<const double> window, MeanMode mean_mode = MeanMode::zero);

/// Asymptotic standard errors from the central-difference Hessian of the
/// negative log-likelihood at the optimum, on the original parameter scale.
/// Entries that cannot be computed are NaN.
VolParams fit_standard_errors(const FittedVolModel& model, std::span<const double> window,
                              MeanMode mean_mode = MeanMode::zero);

} // namespace riskcast
