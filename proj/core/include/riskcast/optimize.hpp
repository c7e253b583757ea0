#pragma once

#include <functional>
#include <vector>

namespace riskcast {

struct NelderMeadOptions {
    double f_tolerance = 1e-8; // converged when the simplex objective spread falls below this
    int max_evaluations = 2000;
    double initial_step = 0.25; // per-coordinate simplex offset
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Downhill-simplex minimizer. Deterministic given the start point.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

} // namespace riskcast
