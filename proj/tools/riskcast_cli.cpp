// Command-line front end: run experiments, backtest forecast files, render
// bundle reports, and generate the bundled sample dataset.

#include "riskcast/csv.hpp"
#include "riskcast/errors.hpp"
#include "riskcast/evaluation.hpp"
#include "riskcast/runner.hpp"
#include "riskcast/sample_data.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

using namespace riskcast;

namespace {

int cmd_run(const std::string& config_path, const std::string& output_override,
            unsigned threads) {
    ExperimentConfig config = ExperimentConfig::load(config_path);
    if (!output_override.empty()) config.output_dir = output_override;
    if (threads > 0) config.parallelism = threads;
    const ReportBundle bundle = run_experiment(config);
    emit_report(bundle, config.output_dir);
    std::printf("run complete: %zu model runs, %d flagged rows, %.1fs\n", bundle.runs.size(),
                bundle.flagged_rows, bundle.wall_clock_sec);
    std::printf("report written to %s\n", config.output_dir.c_str());
    return bundle.flagged_rows > 0 ? 1 : 0;
}

ReturnSeries load_returns_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    std::vector<ReturnPoint> pts;
    for (std::size_t row = 0; row < lines.size(); ++row) {
        if (row == 0 && lines[row].rfind("date", 0) == 0) continue;
        const auto fields = csv::split(lines[row], ',');
        if (fields.size() < 2)
            throw FormatError("returns file: too few columns at " + path + ":" +
                              std::to_string(row + 1));
        pts.push_back({Date::parse(fields[0]),
                       csv::parse_double(fields[1], path + ":" + std::to_string(row + 1))});
    }
    return ReturnSeries(path, std::move(pts));
}

void print_report(const BacktestReport& r) {
    std::printf("%-18s %-5s days=%d breaches=%d zone=%s\n", r.model_id.c_str(),
                r.stressed ? "svar" : "var", r.n_days, r.n_breaches, to_string(r.zone));
    std::printf("    kupiec: LR=%.4f p=%.5f %s\n", r.kupiec.lr, r.kupiec.p_value,
                r.kupiec.reject ? "reject" : "fail-to-reject");
    if (r.christoffersen.defined)
        std::printf("    christoffersen: LR=%.4f p=%.5f %s\n", r.christoffersen.lr,
                    r.christoffersen.p_value,
                    r.christoffersen.reject ? "reject" : "fail-to-reject");
    else
        std::printf("    christoffersen: undefined (too few breach transitions)\n");
    std::printf("    errors: MAE=%.4f RMSE=%.4f MAPE=%.3f%% SMAPE=%.3f%%%s\n", r.errors.mae,
                r.errors.rmse, r.errors.mape, r.errors.smape,
                r.errors.mape_defined ? "" : " (MAPE undefined; SMAPE substituted)");
}

int cmd_backtest(const std::string& forecasts_path, const std::string& returns_path,
                 double sig, const std::string& mape_denom) {
    const ReturnSeries returns = load_returns_csv(returns_path);
    std::map<Date, std::size_t> by_date;
    for (std::size_t i = 0; i < returns.size(); ++i) by_date[returns[i].date] = i;

    struct Key {
        std::string id;
        bool stressed;
        bool operator<(const Key& o) const {
            return std::tie(id, stressed) < std::tie(o.id, o.stressed);
        }
    };
    std::map<Key, std::vector<RiskForecast>> groups;
    const auto lines = csv::read_lines(forecasts_path);
    for (std::size_t row = 0; row < lines.size(); ++row) {
        if (row == 0 && lines[row].rfind("date", 0) == 0) continue;
        const auto f = csv::split(lines[row], ',');
        if (f.size() < 4)
            throw FormatError("forecast file: too few columns at " + forecasts_path + ":" +
                              std::to_string(row + 1));
        RiskForecast fc;
        fc.date = Date::parse(f[0]);
        fc.model_id = f[1];
        fc.stressed = f[2] == "1" || f[2] == "true";
        fc.var_fraction =
            csv::parse_double(f[3], forecasts_path + ":" + std::to_string(row + 1));
        groups[{fc.model_id, fc.stressed}].push_back(std::move(fc));
    }
    const MapeDenominator denom =
        mape_denom == "actual" ? MapeDenominator::actual_return : MapeDenominator::forecast;
    for (auto& [key, forecasts] : groups) {
        // Align the return series to the forecast dates.
        std::vector<ReturnPoint> pts;
        pts.reserve(forecasts.size());
        for (const auto& fc : forecasts) {
            const auto it = by_date.find(fc.date);
            if (it == by_date.end())
                throw InputError("no return observation for forecast date " +
                                 fc.date.to_string());
            pts.push_back(returns[it->second]);
        }
        const ReturnSeries aligned(returns.id(), std::move(pts));
        print_report(backtest(key.id, key.stressed, forecasts, aligned, 0.01, sig, denom));
    }
    return 0;
}

int cmd_report(const std::string& bundle_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(bundle_dir);
    {
        std::ifstream meta(dir / "run_metadata.json");
        if (!meta) throw IoError("not a report bundle (missing run_metadata.json): " + bundle_dir);
        std::printf("%s\n", std::string((std::istreambuf_iterator<char>(meta)),
                                        std::istreambuf_iterator<char>())
                                .c_str());
    }
    std::ifstream tables(dir / "summary_tables.txt");
    if (tables)
        std::printf("%s", std::string((std::istreambuf_iterator<char>(tables)),
                                      std::istreambuf_iterator<char>())
                              .c_str());
    return 0;
}

int cmd_sample_data(const std::string& out_dir, std::uint64_t seed) {
    const SampleDataSummary s = generate_sample_dataset({out_dir, seed});
    std::printf("wrote %d trading days (%s .. %s) to %s\n", s.n_days,
                s.first_date.to_string().c_str(), s.last_date.to_string().c_str(),
                out_dir.c_str());
    std::printf("out-of-sample: %d days from %s\n", s.out_of_sample_days,
                s.first_out_of_sample.to_string().c_str());
    std::printf("oos daily log returns: mean=%.4f%% sd=%.4f%% min=%.4f max=%.4f skew=%.2f "
                "kurt=%.2f\n",
                100.0 * s.oos_stats.mean, 100.0 * s.oos_stats.sd, s.oos_stats.min,
                s.oos_stats.max, s.oos_stats.skewness, s.oos_stats.kurtosis);
    std::printf("manifest: %s\n", s.manifest_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"riskcast: VaR and stressed-VaR forecasting and backtesting engine"};
    app.require_subcommand(1);

    std::string config_path, output_override;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--output", output_override, "override the configured output directory");
    run->add_option("--threads", threads, "worker threads (default: RISKCAST_THREADS or cores)");

    std::string forecasts_path, returns_path, mape_denom = "forecast";
    double sig = 0.01;
    auto* bt = app.add_subcommand("backtest", "backtest a forecast file against returns");
    bt->add_option("--forecasts", forecasts_path,
                   "forecast CSV (date,model_id,stressed,var_fraction)")
        ->required();
    bt->add_option("--returns", returns_path, "log-return CSV (date,value)")->required();
    bt->add_option("--sig", sig, "test significance level (default 0.01)");
    bt->add_option("--mape-denominator", mape_denom, "forecast|actual (default forecast)");

    std::string bundle_dir;
    auto* rep = app.add_subcommand("report", "print the summary of a report bundle");
    rep->add_option("--bundle", bundle_dir, "bundle directory from a previous run")->required();

    std::string sample_out;
    std::uint64_t sample_seed = 20200214ull;
    auto* sd = app.add_subcommand("sample-data", "generate the bundled synthetic dataset");
    sd->add_option("--out", sample_out, "output directory")->required();
    sd->add_option("--seed", sample_seed, "generator seed (default 20200214)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, output_override, threads);
        if (bt->parsed()) return cmd_backtest(forecasts_path, returns_path, sig, mape_denom);
        if (rep->parsed()) return cmd_report(bundle_dir);
        if (sd->parsed()) return cmd_sample_data(sample_out, sample_seed);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 2;
    }
    return 0;
}
