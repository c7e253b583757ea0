#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracle {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

} // namespace

double normal_cdf(double z) {
    const double az = std::abs(z);
    double tail;
    if (az < 6.0) {
        // Taylor series: Phi(z) = 1/2 + phi(z) * sum z^(2k+1) * prod(1/(2i+1)).
        double term = az, sum = az;
        for (int k = 1; k < 400; ++k) {
            term *= az * az / (2.0 * k + 1.0);
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        const double upper = 0.5 + normal_pdf(az) * sum;
        tail = 1.0 - upper;
    } else {
        // Continued fraction for the Mills ratio.
        double cf = 0.0;
        for (int k = 60; k >= 1; --k) cf = k / (az + cf);
        tail = normal_pdf(az) / (az + cf);
    }
    return z >= 0.0 ? 1.0 - tail : tail;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p outside (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double kth_smallest(std::span<const double> values, std::size_t k) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted.at(k - 1);
}

std::vector<std::size_t> bottom_k_indices(std::span<const double> values, std::size_t k) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

// Gaussian elimination solve; small systems only.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (std::abs(a[col][col]) < 1e-14) throw std::runtime_error("singular system");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

} // namespace

double gaussian_conditional_mean(const std::vector<double>& mean,
                                 const std::vector<std::vector<double>>& cov, int target,
                                 const std::vector<int>& evidence_idx,
                                 const std::vector<double>& evidence_val) {
    const std::size_t m = evidence_idx.size();
    std::vector<std::vector<double>> see(m, std::vector<double>(m));
    std::vector<double> diff(m), ste(m);
    for (std::size_t i = 0; i < m; ++i) {
        diff[i] = evidence_val[i] - mean[static_cast<std::size_t>(evidence_idx[i])];
        ste[i] = cov[static_cast<std::size_t>(target)][static_cast<std::size_t>(evidence_idx[i])];
        for (std::size_t j = 0; j < m; ++j)
            see[i][j] = cov[static_cast<std::size_t>(evidence_idx[i])]
                           [static_cast<std::size_t>(evidence_idx[j])];
    }
    const std::vector<double> w = solve(see, diff);
    double out = mean[static_cast<std::size_t>(target)];
    for (std::size_t i = 0; i < m; ++i) out += ste[i] * w[i];
    return out;
}

void sem_moments(const Sem& sem, std::vector<double>& mean,
                 std::vector<std::vector<double>>& cov) {
    const std::size_t n = sem.intercept.size();
    // Topological order by repeated sweeps (coef graph is acyclic).
    std::vector<int> order;
    std::vector<bool> done(n, false);
    while (order.size() < n) {
        bool progress = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            bool ready = true;
            for (std::size_t j = 0; j < n; ++j)
                if (sem.coef[i][j] != 0.0 && !done[j]) ready = false;
            if (ready) {
                order.push_back(static_cast<int>(i));
                done[i] = true;
                progress = true;
            }
        }
        if (!progress) throw std::runtime_error("sem_moments: cyclic coefficients");
    }
    mean.assign(n, 0.0);
    cov.assign(n, std::vector<double>(n, 0.0));
    for (int iq : order) {
        const std::size_t i = static_cast<std::size_t>(iq);
        mean[i] = sem.intercept[i];
        for (std::size_t j = 0; j < n; ++j) mean[i] += sem.coef[i][j] * mean[j];
        // cov(x_i, x_k) for all processed k, then var(x_i).
        for (std::size_t k = 0; k < n; ++k) {
            if (!done[k]) continue;
            double c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (sem.coef[i][j] != 0.0) c += sem.coef[i][j] * cov[j][k];
            if (k != i) {
                cov[i][k] = c;
                cov[k][i] = c;
            }
        }
        double v = sem.noise_var[i];
        for (std::size_t j = 0; j < n; ++j)
            if (sem.coef[i][j] != 0.0) v += sem.coef[i][j] * cov[i][j];
        cov[i][i] = v;
    }
}

} // namespace oracle
