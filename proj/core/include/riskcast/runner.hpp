#pragma once

#include "riskcast/dbn.hpp"
#include "riskcast/evaluation.hpp"
#include "riskcast/panel.hpp"
#include "riskcast/risk.hpp"
#include "riskcast/volatility.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace riskcast {

enum class ModelFamily { hs, delta_normal, arch1, garch11, egarch11, riskmetrics, dbn };

/// One entry of the model grid: a family plus its innovation distribution or
/// structure learner where applicable.
struct ModelVariant {
    ModelFamily family = ModelFamily::hs;
    DistKind innovation = DistKind::normal; // parametric families only
    StructAlgo algo = StructAlgo::pc_stable; // dbn only

    std::string id() const;
    static ModelVariant parse(const std::string& id);
    bool operator==(const ModelVariant&) const = default;
};

struct DbnSettings {
    double significance = 0.05;
    int max_condition = 3;
    int structure_refresh_days = 1; // relearn structure every N days; parameters refit daily
    int markov_order = 1;
};

struct ExperimentConfig {
    std::string manifest_path;
    std::size_t window_length = 1264;
    int horizon_days = 10;
    double confidence = 0.99;
    std::vector<ModelVariant> models;
    bool run_var = true;
    bool run_svar = true;
    DbnSettings dbn;
    unsigned parallelism = 0; // 0: RISKCAST_THREADS env var, then hardware
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    MeanMode mean_mode = MeanMode::zero;
    MapeDenominator mape_denominator = MapeDenominator::forecast;
    /// When set, skewed-t innovations use these fixed (nu, xi) instead of
    /// estimating them inside each MLE.
    std::optional<std::pair<double, double>> fixed_skewt;
    /// Optional cap on the out-of-sample span (first N days), for desk-scale runs.
    std::optional<int> out_of_sample_days;

    static ExperimentConfig load(const std::string& path);
    void validate() const;
    /// Stable serialized form used for the config hash.
    std::string canonical_text() const;
};

struct DbnTraceRow {
    Date date;
    double predicted_close = 0.0;
    double forecast_return = 0.0;
};

/// Forecast series plus its backtest for one (model, measure) pair.
struct ModelRun {
    ModelVariant model;
    bool stressed = false;
    std::vector<RiskForecast> forecasts;
    BacktestReport report;
    int flagged_rows = 0;
    std::vector<DbnTraceRow> model_trace;      // dbn runs only
    std::vector<std::string> structure_lines;  // dbn runs only
};

struct ReportBundle {
    ExperimentConfig config;
    std::string config_hash;
    Date data_first, data_last;
    Date oos_first, oos_last;
    ReturnSeries oos_returns;
    std::vector<ModelRun> runs;
    std::map<std::string, std::vector<std::string>> structure_exports; // dbn model id -> lines
    std::map<std::string, std::vector<DbnTraceRow>> dbn_traces;
    int flagged_rows = 0;
    double wall_clock_sec = 0.0;
};

/// Runs the full experiment: staging, rolling calibration, forecasts and
/// backtests for every configured (model, measure). Deterministic given the
/// config and seed at any parallelism degree.
ReportBundle run_experiment(const ExperimentConfig& config);

/// Writes forecast files, the backtest/error summary, structure exports and
/// run metadata into `dir`.
void emit_report(const ReportBundle& bundle, const std::string& dir);

/// FNV-1a over the canonical config text, hex-encoded.
std::string config_hash(const ExperimentConfig& config);

} // namespace riskcast
