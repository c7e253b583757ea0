#include "riskcast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskcast {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    NelderMeadResult result;
    result.x = start;

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double f = objective(x);
        return std::isfinite(f) ? f : 1e300;
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double& coord = simplex[i + 1][i];
        coord += coord != 0.0 ? options.initial_step * std::abs(coord) : options.initial_step;
    }
    for (std::size_t i = 0; i <= n; ++i) fx[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n);
    bool converged = false;

    while (evals < options.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n > 0 ? n - 1 : 0];

        if (std::abs(fx[worst] - fx[best]) < options.f_tolerance) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[k][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            for (std::size_t j = 0; j < n; ++j)
                trial[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
        };

        blend(-1.0); // reflection
        const double fr = eval(trial);
        if (fr < fx[best]) {
            std::vector<double> reflected = trial;
            blend(-2.0); // expansion
            const double fe = eval(trial);
            if (fe < fr) {
                simplex[worst] = trial;
                fx[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                fx[worst] = fr;
            }
            continue;
        }
        if (fr < fx[second]) {
            simplex[worst] = trial;
            fx[worst] = fr;
            continue;
        }
        if (fr < fx[worst]) {
            blend(-0.5); // outside contraction
            const double fc = eval(trial);
            if (fc <= fr) {
                simplex[worst] = trial;
                fx[worst] = fc;
                continue;
            }
        } else {
            blend(0.5); // inside contraction
            const double fc = eval(trial);
            if (fc < fx[worst]) {
                simplex[worst] = trial;
                fx[worst] = fc;
                continue;
            }
        }
        // Shrink toward the best vertex.
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
            fx[k] = eval(simplex[k]);
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    result.x = simplex[best];
    result.f = fx[best];
    result.evaluations = evals;
    result.converged = converged;
    return result;
}

} // namespace riskcast
