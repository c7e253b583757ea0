#include <doctest.h>

#include "oracles.hpp"
#include "riskcast/dbn.hpp"
#include "riskcast/errors.hpp"

#include <cmath>
#include <random>

using namespace riskcast;

namespace {

VariablePanel panel_from_columns(const std::vector<std::string>& ids,
                                 const std::vector<std::vector<double>>& cols,
                                 const std::string& target) {
    std::vector<Date> dates;
    for (std::size_t i = 0; i < cols[0].size(); ++i)
        dates.push_back(Date::from_serial(12000 + static_cast<std::int64_t>(i)));
    return VariablePanel(dates, ids, cols, target);
}

// AR(1) target plus independent noise predictors.
VariablePanel chain_panel(std::size_t days, int n_noise, double coef, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::string> ids{"x"};
    std::vector<std::vector<double>> cols;
    std::vector<double> x(days);
    x[0] = z(rng);
    for (std::size_t i = 1; i < days; ++i) x[i] = coef * x[i - 1] + z(rng);
    cols.push_back(x);
    for (int k = 0; k < n_noise; ++k) {
        ids.push_back("n" + std::to_string(k));
        std::vector<double> c(days);
        for (double& v : c) v = z(rng);
        cols.push_back(c);
    }
    return panel_from_columns(ids, cols, "x");
}

VariablePanel noise_panel(std::size_t days, int n_vars, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<std::string> ids;
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < n_vars; ++k) {
        ids.push_back("v" + std::to_string(k));
        std::vector<double> c(days);
        for (double& v : c) v = z(rng);
        cols.push_back(c);
    }
    return panel_from_columns(ids, cols, "v0");
}

bool has_edge(const DbnStructure& s, const std::string& parent, const std::string& child) {
    for (const auto& e : s.edges) {
        if (s.node_names[static_cast<std::size_t>(e.parent)] == parent &&
            s.node_names[static_cast<std::size_t>(e.child)] == child)
            return true;
    }
    return false;
}

void check_temporal_constraint(const DbnStructure& s) {
    for (const auto& e : s.edges) {
        CHECK(s.is_current(e.child));                       // nothing ends in a lag slice
        CHECK(e.parent != s.target_node());                 // nothing leaves the target
    }
}

} // namespace

TEST_CASE("build_slices row and column counts") {
    const auto panel = chain_panel(5, 1, 0.5, 1);
    const TwoSliceDataset d =
        build_slices(panel, panel.dates().front(), panel.dates().back());
    CHECK(d.n_rows() == 4);
    CHECK(d.n_nodes() == 4); // 2 vars x 2 slices
    CHECK(d.node_name(0) == "t-1:x");
    CHECK(d.node_name(2) == "t:x");

    const auto big = chain_panel(1400, 41, 0.5, 2);
    const Date from = big.dates()[0];
    const Date to = big.dates()[1263];
    const TwoSliceDataset d2 = build_slices(big, from, to);
    CHECK(d2.n_rows() == 1263);
    CHECK(d2.n_nodes() == 84); // 42-variable panel over two slices

    CHECK_THROWS_AS(build_slices(big, from, from), DomainError);
}

TEST_CASE("build_slices pairs consecutive days") {
    const auto panel = chain_panel(10, 0, 0.9, 3);
    const TwoSliceDataset d =
        build_slices(panel, panel.dates().front(), panel.dates().back());
    const auto& col = panel.column("x");
    for (int r = 0; r < d.n_rows(); ++r) {
        CHECK(d.rows(r, 0) == col[static_cast<std::size_t>(r)]);
        CHECK(d.rows(r, 1) == col[static_cast<std::size_t>(r) + 1]);
        CHECK(d.dates[static_cast<std::size_t>(r)] == panel.dates()[static_cast<std::size_t>(r) + 1]);
    }
}

TEST_CASE("ci_test: perfect dependence, independence size, and chain separation") {
    SUBCASE("exact copy gives p ~ 0") {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> x(600);
        for (double& v : x) v = z(rng);
        auto panel = panel_from_columns({"a", "b"}, {x, x}, "a");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        CHECK(ci_test(d, 2, 3, {}) < 1e-12); // t:a vs t:b are identical columns
    }

    SUBCASE("size: independent columns reject at ~alpha") {
        // 1035 pairs of independent standard normals, n = 5000.
        const auto panel = noise_panel(5001, 46, 5);
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        int rejections = 0, trials = 0;
        const int c0 = d.n_vars; // current-slice offset for order 1
        for (int a = 0; a < d.n_vars; ++a) {
            for (int b = a + 1; b < d.n_vars; ++b) {
                ++trials;
                if (ci_test(d, c0 + a, c0 + b, {}) < 0.05) ++rejections;
            }
        }
        CHECK(trials == 1035);
        const double rate = static_cast<double>(rejections) / trials;
        CHECK(rate > 0.030);
        CHECK(rate < 0.070);
    }

    SUBCASE("x -> z -> y chain: conditioning on z separates") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> noise(0.0, 1.0);
        const std::size_t n = 5000;
        std::vector<double> x(n), zc(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = noise(rng);
            zc[i] = 0.8 * x[i] + 0.6 * noise(rng);
            y[i] = 0.8 * zc[i] + 0.6 * noise(rng);
        }
        auto panel = panel_from_columns({"x", "z", "y"}, {x, zc, y}, "x");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        const int cx = 3, cz = 4, cy = 5; // current-slice indices
        CHECK(ci_test(d, cx, cy, {}) < 1e-6);
        const std::vector<int> given{cz};
        CHECK(ci_test(d, cx, cy, given) > 0.05);
    }

    SUBCASE("collinear conditioning set raises NumericalError") {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> a(500), b(500), c(500);
        for (std::size_t i = 0; i < 500; ++i) {
            a[i] = z(rng);
            b[i] = 2.0 * a[i]; // exact collinearity inside the conditioning set
            c[i] = z(rng);
        }
        auto panel = panel_from_columns({"a", "b", "c"}, {a, b, c}, "a");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        const std::vector<int> given{3, 4}; // t:a, t:b
        CHECK_THROWS_AS(ci_test(d, 0, 5, given), NumericalError);
    }
}

TEST_CASE("all three learners recover the lag edge of an order-1 chain") {
    const auto panel = chain_panel(5001, 3, 0.9, 8);
    const TwoSliceDataset d = build_slices(panel, panel.dates().front(), panel.dates().back());
    for (StructAlgo algo : {StructAlgo::pc_stable, StructAlgo::mmhc, StructAlgo::si_hiton_pc}) {
        CAPTURE(to_string(algo));
        const DbnStructure s = learn_structure(d, algo);
        CHECK(has_edge(s, "t-1:x", "t:x"));
        check_temporal_constraint(s);
    }
}

TEST_CASE("pure-noise panels keep the spurious-edge rate at the test level") {
    // On independent noise the per-pair false-edge probability is the CI
    // significance alpha = 0.05 (higher levels barely prune: conditioning on
    // an unrelated variable hardly moves the partial correlation), so the
    // observed rate concentrates at alpha. Bound: alpha + 3 binomial sd.
    for (StructAlgo algo : {StructAlgo::pc_stable, StructAlgo::mmhc, StructAlgo::si_hiton_pc}) {
        int total_edges = 0, total_pairs = 0;
        for (int rep = 0; rep < 10; ++rep) {
            const auto panel = noise_panel(5001, 8, 1000 + static_cast<std::uint64_t>(rep));
            const TwoSliceDataset d =
                build_slices(panel, panel.dates().front(), panel.dates().back());
            const DbnStructure s = learn_structure(d, algo);
            check_temporal_constraint(s);
            total_edges += static_cast<int>(s.edges.size());
            total_pairs += 8 * 8 + 8 * 7 / 2; // inter-slice + intra-slice pairs
        }
        CAPTURE(std::string(to_string(algo)));
        const double bound =
            0.05 + 3.0 * std::sqrt(0.05 * 0.95 / static_cast<double>(total_pairs));
        CHECK(static_cast<double>(total_edges) / total_pairs <= bound);
    }
}

TEST_CASE("learners are deterministic") {
    const auto panel = chain_panel(2001, 5, 0.7, 9);
    const TwoSliceDataset d = build_slices(panel, panel.dates().front(), panel.dates().back());
    for (StructAlgo algo : {StructAlgo::pc_stable, StructAlgo::mmhc, StructAlgo::si_hiton_pc}) {
        const DbnStructure a = learn_structure(d, algo);
        const DbnStructure b = learn_structure(d, algo);
        CHECK(a.edges == b.edges);
    }
}

TEST_CASE("fit_parameters closed forms and recovery") {
    SUBCASE("no-parent node gets mean and population variance") {
        const auto panel = noise_panel(800, 3, 11);
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        DbnStructure s;
        s.n_vars = d.n_vars;
        s.order = d.order;
        s.target_var = d.target_var;
        for (int i = 0; i < d.n_nodes(); ++i) s.node_names.push_back(d.node_name(i));
        const GaussianDbn m = fit_parameters(s, d);
        for (int node = 0; node < d.n_nodes(); ++node) {
            const double mu = d.mean[static_cast<std::size_t>(node)];
            const double var = d.sd[static_cast<std::size_t>(node)] * d.sd[static_cast<std::size_t>(node)];
            CHECK(m.node_params[static_cast<std::size_t>(node)].intercept ==
                  doctest::Approx(mu).epsilon(1e-12));
            CHECK(m.node_params[static_cast<std::size_t>(node)].resid_var ==
                  doctest::Approx(var).epsilon(1e-12));
        }
    }

    SUBCASE("y = 2x + noise recovers the coefficient") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> noise(0.0, 0.1);
        std::normal_distribution<double> zx(0.0, 1.0);
        const std::size_t n = 10001;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = zx(rng);
            y[i] = 2.0 * x[i] + noise(rng);
        }
        auto panel = panel_from_columns({"y", "x"}, {y, x}, "y");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        DbnStructure s;
        s.n_vars = 2;
        s.order = 1;
        s.target_var = 0;
        for (int i = 0; i < 4; ++i) s.node_names.push_back(d.node_name(i));
        s.edges.push_back({3, 2}); // t:x -> t:y
        const GaussianDbn m = fit_parameters(s, d);
        const auto& np = m.node_params[2];
        REQUIRE(np.parents.size() == 1);
        CHECK(np.coef[0] == doctest::Approx(2.0).epsilon(0.01 / 2.0));
        CHECK(np.resid_var == doctest::Approx(0.01).epsilon(0.1));
    }

    SUBCASE("rank-deficient parent matrix names the node") {
        std::mt19937_64 rng(13);
        std::normal_distribution<double> z(0.0, 1.0);
        std::vector<double> a(400), b(400), t(400);
        for (std::size_t i = 0; i < 400; ++i) {
            a[i] = z(rng);
            b[i] = -a[i];
            t[i] = a[i] + z(rng);
        }
        auto panel = panel_from_columns({"t", "a", "b"}, {t, a, b}, "t");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        DbnStructure s;
        s.n_vars = 3;
        s.order = 1;
        s.target_var = 0;
        for (int i = 0; i < 6; ++i) s.node_names.push_back(d.node_name(i));
        s.edges.push_back({4, 3}); // t:a -> t:t
        s.edges.push_back({5, 3}); // t:b -> t:t (collinear with t:a)
        try {
            fit_parameters(s, d);
            FAIL("expected NumericalError");
        } catch (const NumericalError& e) {
            CHECK(std::string(e.what()).find("t:t") != std::string::npos);
        }
    }
}

TEST_CASE("useless parent raises AIC at the chi-square(1) rate") {
    // Oracle: P(AIC increases) = P(chi2_1 < 2) = 0.8427, so over 200
    // replications the count concentrates near 169 (sd ~ 5.2).
    std::mt19937_64 rng(14);
    std::normal_distribution<double> noise(0.0, 1.0);
    int increased = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const std::size_t n = 501;
        std::vector<double> x(n), w(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = noise(rng);
            w[i] = noise(rng); // useless
            y[i] = 2.0 * x[i] + noise(rng);
        }
        auto panel = panel_from_columns({"y", "x", "w"}, {y, x, w}, "y");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        DbnStructure base;
        base.n_vars = 3;
        base.order = 1;
        base.target_var = 0;
        for (int i = 0; i < 6; ++i) base.node_names.push_back(d.node_name(i));
        base.edges.push_back({4, 3}); // t:x -> t:y
        DbnStructure bigger = base;
        bigger.edges.push_back({5, 3}); // t:w -> t:y
        const double aic0 = fit_parameters(base, d).fit_aic;
        const double aic1 = fit_parameters(bigger, d).fit_aic;
        if (aic1 > aic0) ++increased;
    }
    CHECK(increased >= static_cast<int>(0.75 * reps));
    CHECK(increased <= static_cast<int>(0.93 * reps));
}

TEST_CASE("fit_aic equals 2k - 2 loglik recomputed from residuals") {
    const auto panel = chain_panel(1001, 2, 0.8, 15);
    const TwoSliceDataset d = build_slices(panel, panel.dates().front(), panel.dates().back());
    const DbnStructure s = learn_structure(d, StructAlgo::mmhc);
    const GaussianDbn m = fit_parameters(s, d);

    double loglik = 0.0;
    double k = 0.0;
    const double n = d.n_rows();
    for (int node = 0; node < d.n_nodes(); ++node) {
        const auto& np = m.node_params[static_cast<std::size_t>(node)];
        double rss = 0.0;
        for (int r = 0; r < d.n_rows(); ++r) {
            double pred = np.intercept;
            for (std::size_t j = 0; j < np.parents.size(); ++j)
                pred += np.coef[j] * d.rows(r, np.parents[j]);
            const double e = d.rows(r, node) - pred;
            rss += e * e;
        }
        const double sigma2 = rss / n;
        loglik += -0.5 * n * (std::log(2.0 * M_PI * sigma2) + 1.0);
        k += 2.0 + static_cast<double>(np.parents.size());
    }
    CHECK(m.fit_aic == doctest::Approx(2.0 * k - 2.0 * loglik).epsilon(1e-8));
    CHECK(m.loglik == doctest::Approx(loglik).epsilon(1e-8));
}

TEST_CASE("forecast_one_step") {
    SUBCASE("single lag regression") {
        GaussianDbn m;
        m.structure.n_vars = 1;
        m.structure.order = 1;
        m.structure.target_var = 0;
        m.structure.node_names = {"t-1:x", "t:x"};
        m.structure.edges.push_back({0, 1});
        m.node_params.resize(2);
        m.node_params[1].intercept = 0.0;
        m.node_params[1].parents = {0};
        m.node_params[1].coef = {2.0};
        const std::vector<double> evidence{5.0};
        CHECK(forecast_one_step(m, evidence) == doctest::Approx(10.0));
    }

    SUBCASE("empty-parent target forecasts its training mean") {
        const auto panel = noise_panel(500, 2, 16);
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        DbnStructure s;
        s.n_vars = 2;
        s.order = 1;
        s.target_var = 0;
        for (int i = 0; i < 4; ++i) s.node_names.push_back(d.node_name(i));
        const GaussianDbn m = fit_parameters(s, d);
        const std::vector<double> evidence{1.23, -0.5};
        CHECK(forecast_one_step(m, evidence) ==
              doctest::Approx(d.mean[2]).epsilon(1e-12));
    }

    SUBCASE("chain through an unobserved current node matches dense conditioning") {
        // lag-x -> y_t -> target_t, y_t unobserved at forecast time.
        std::mt19937_64 rng(17);
        std::normal_distribution<double> noise(0.0, 1.0);
        const std::size_t n = 4000;
        std::vector<double> tgt(n), y(n), x(n);
        x[0] = noise(rng);
        y[0] = noise(rng);
        tgt[0] = noise(rng);
        for (std::size_t i = 1; i < n; ++i) {
            x[i] = 0.5 * x[i - 1] + noise(rng);
            y[i] = 1.5 * x[i - 1] + 0.3 * noise(rng);
            tgt[i] = 0.8 * y[i] + 0.2 * noise(rng);
        }
        auto panel = panel_from_columns({"tgt", "y", "x"}, {tgt, y, x}, "tgt");
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        DbnStructure s;
        s.n_vars = 3;
        s.order = 1;
        s.target_var = 0;
        for (int i = 0; i < 6; ++i) s.node_names.push_back(d.node_name(i));
        s.edges.push_back({2, 4}); // t-1:x -> t:y
        s.edges.push_back({4, 3}); // t:y -> t:tgt
        const GaussianDbn m = fit_parameters(s, d);

        // Dense-oracle joint over the 6 nodes from the fitted SEM.
        oracle::Sem sem;
        const int nn = 6;
        sem.intercept.resize(nn);
        sem.coef.assign(nn, std::vector<double>(nn, 0.0));
        sem.noise_var.resize(nn);
        for (int node = 0; node < nn; ++node) {
            const auto& np = m.node_params[static_cast<std::size_t>(node)];
            sem.intercept[static_cast<std::size_t>(node)] = np.intercept;
            sem.noise_var[static_cast<std::size_t>(node)] = np.resid_var;
            for (std::size_t j = 0; j < np.parents.size(); ++j)
                sem.coef[static_cast<std::size_t>(node)][static_cast<std::size_t>(np.parents[j])] =
                    np.coef[j];
        }
        std::vector<double> mean;
        std::vector<std::vector<double>> cov;
        oracle::sem_moments(sem, mean, cov);

        const std::vector<double> evidence{0.7, -1.1, 2.3};
        const double got = forecast_one_step(m, evidence);
        const double want =
            oracle::gaussian_conditional_mean(mean, cov, 3, {0, 1, 2}, evidence);
        CHECK(got == doctest::Approx(want).epsilon(1e-9));
    }

    SUBCASE("forecast is linear in the evidence (superposition)") {
        const auto panel = chain_panel(3000, 2, 0.8, 18);
        const TwoSliceDataset d =
            build_slices(panel, panel.dates().front(), panel.dates().back());
        const DbnStructure s = learn_structure(d, StructAlgo::pc_stable);
        const GaussianDbn m = fit_parameters(s, d);
        std::mt19937_64 rng(19);
        std::normal_distribution<double> z(0.0, 1.0);
        const int ne = d.n_vars;
        std::vector<double> e1(static_cast<std::size_t>(ne)), e2(static_cast<std::size_t>(ne)),
            mid(static_cast<std::size_t>(ne));
        for (int i = 0; i < ne; ++i) {
            e1[static_cast<std::size_t>(i)] = z(rng);
            e2[static_cast<std::size_t>(i)] = z(rng);
            mid[static_cast<std::size_t>(i)] =
                0.5 * (e1[static_cast<std::size_t>(i)] + e2[static_cast<std::size_t>(i)]);
        }
        const double f1 = forecast_one_step(m, e1);
        const double f2 = forecast_one_step(m, e2);
        const double fm = forecast_one_step(m, mid);
        CHECK(fm == doctest::Approx(0.5 * (f1 + f2)).epsilon(1e-10));
    }

    SUBCASE("missing evidence is rejected") {
        GaussianDbn m;
        m.structure.n_vars = 2;
        m.structure.order = 1;
        m.structure.target_var = 0;
        m.structure.node_names = {"t-1:a", "t-1:b", "t:a", "t:b"};
        m.node_params.resize(4);
        const std::vector<double> tooshort{1.0};
        CHECK_THROWS_AS(forecast_one_step(m, tooshort), InputError);
        const std::vector<double> with_nan{1.0, std::nan("")};
        CHECK_THROWS_AS(forecast_one_step(m, with_nan), InputError);
    }
}

TEST_CASE("forecast_return round trip") {
    CHECK(forecast_return(110.0, 100.0) == doctest::Approx(0.0953102).epsilon(1e-6));
    CHECK(forecast_return(250.0, 250.0) == 0.0);
    const double r = forecast_return(312.7, 298.4);
    CHECK(298.4 * std::exp(r) == doctest::Approx(312.7).epsilon(1e-12));
    CHECK_THROWS_AS(forecast_return(-1.0, 100.0), DomainError);
    CHECK_THROWS_AS(forecast_return(100.0, 0.0), DomainError);
}

TEST_CASE("standardization invariance: forecasts match a raw-space regression") {
    // The learners standardize columns internally; the de-standardized
    // parameters must reproduce plain OLS on raw data.
    std::mt19937_64 rng(20);
    std::normal_distribution<double> noise(0.0, 3.0);
    const std::size_t n = 3000;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 500.0 + 40.0 * noise(rng);
        y[i] = 0.25 * x[i] + 100.0 + noise(rng);
    }
    auto panel = panel_from_columns({"y", "x"}, {y, x}, "y");
    const TwoSliceDataset d = build_slices(panel, panel.dates().front(), panel.dates().back());
    DbnStructure s;
    s.n_vars = 2;
    s.order = 1;
    s.target_var = 0;
    for (int i = 0; i < 4; ++i) s.node_names.push_back(d.node_name(i));
    s.edges.push_back({3, 2}); // t:x -> t:y
    const GaussianDbn m = fit_parameters(s, d);
    CHECK(m.node_params[2].coef[0] == doctest::Approx(0.25).epsilon(5e-3));
    CHECK(m.node_params[2].intercept == doctest::Approx(100.0).epsilon(0.05));
}
