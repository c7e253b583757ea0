#pragma once

namespace riskcast {

enum class DistKind { normal, skewed_t };

/// Innovation distribution for volatility models, standardized to mean 0 and
/// variance 1. The skewed Student's t follows the two-piece construction: the
/// unit-variance symmetric t density is scaled by xi on the right half and
/// 1/xi on the left, then shifted and rescaled back to zero mean and unit
/// variance. xi = 1 recovers the symmetric t; nu > 2 keeps the variance finite.
struct InnovationDist {
    DistKind kind = DistKind::normal;
    double nu = 0.0; // degrees of freedom, skewed-t only
    double xi = 1.0; // asymmetry, skewed-t only

    static InnovationDist normal() { return {DistKind::normal, 0.0, 1.0}; }
    static InnovationDist skewed_t(double nu, double xi);
};

/// Natural log of the standardized density at z.
double log_density(const InnovationDist& dist, double z);
double density(const InnovationDist& dist, double z);

/// P(Z <= z).
double cdf(const InnovationDist& dist, double z);

/// Value q with cdf(q) = p to absolute tolerance 1e-10; the skewed-t inverts
/// the CDF by bracketed root-finding. p outside (0,1) raises DomainError.
double quantile(const InnovationDist& dist, double p);

/// E|Z|. Closed form for the normal; adaptive quadrature cached per (nu, xi)
/// for the skewed-t. The cache is safe for concurrent use.
double expected_abs(const InnovationDist& dist);

/// Hot-loop companion of log_density: hoists the per-parameter constants out
/// of likelihood loops that evaluate thousands of points at fixed (nu, xi).
class DensityEvaluator {
public:
    explicit DensityEvaluator(const InnovationDist& dist);
    double log_density(double z) const;

private:
    DistKind kind_;
    double nu_ = 0, xi_ = 1;
    double base_log_norm_ = 0, m_ = 0, s_ = 1, log_halves_s_ = 0;
};

} // namespace riskcast
