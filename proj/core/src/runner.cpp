#include "riskcast/runner.hpp"

#include "riskcast/csv.hpp"
#include "riskcast/errors.hpp"
#include "riskcast/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace riskcast {

namespace {

const char* family_name(ModelFamily f) {
    switch (f) {
    case ModelFamily::hs: return "hs";
    case ModelFamily::delta_normal: return "delta-normal";
    case ModelFamily::arch1: return "arch1";
    case ModelFamily::garch11: return "garch11";
    case ModelFamily::egarch11: return "egarch11";
    case ModelFamily::riskmetrics: return "riskmetrics";
    case ModelFamily::dbn: return "dbn";
    }
    return "?";
}

bool is_parametric(ModelFamily f) {
    return f == ModelFamily::arch1 || f == ModelFamily::garch11 || f == ModelFamily::egarch11 ||
           f == ModelFamily::riskmetrics;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (char c : text) h = (h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c))) *
                            0x100000001b3ull;
    return h;
}

// Ordered pool of the `capacity` worst returns seen so far; ties keep the
// earlier observation, matching stressed_window's selection rule.
class WorstPool {
public:
    explicit WorstPool(std::size_t capacity) : capacity_(capacity) {}

    void insert(double value, std::size_t index) {
        if (set_.size() < capacity_) {
            add(value, index);
            ++version_;
            return;
        }
        const auto last = std::prev(set_.end());
        if (std::pair(value, index) < *last) {
            remove(*last);
            add(value, index);
            ++version_;
        }
    }
    bool full() const { return set_.size() == capacity_; }
    std::uint64_t version() const { return version_; }
    double sum_squares() const { return sum_sq_; }
    std::size_t size() const { return set_.size(); }
    /// k-th smallest member value (1-based k, small k only).
    double kth_value(std::size_t k) const {
        auto it = set_.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(k - 1));
        return it->first;
    }
    /// Member values in chronological order.
    std::vector<double> chronological_values() const {
        std::vector<std::pair<std::size_t, double>> tmp;
        tmp.reserve(set_.size());
        for (const auto& [v, i] : set_) tmp.emplace_back(i, v);
        std::sort(tmp.begin(), tmp.end());
        std::vector<double> out;
        out.reserve(tmp.size());
        for (const auto& [i, v] : tmp) out.push_back(v);
        return out;
    }

private:
    void add(std::pair<double, std::size_t> e) {
        set_.insert(e);
        sum_sq_ += e.first * e.first;
    }
    void add(double v, std::size_t i) { add({v, i}); }
    void remove(std::pair<double, std::size_t> e) {
        set_.erase(e);
        sum_sq_ -= e.first * e.first;
    }
    std::size_t capacity_;
    std::set<std::pair<double, std::size_t>> set_;
    double sum_sq_ = 0.0;
    std::uint64_t version_ = 0;
};

struct StreamContext {
    const ExperimentConfig* config;
    const std::vector<double>* returns; // full return history, index 0 = first return
    const std::vector<Date>* return_dates;
    const std::vector<double>* closes;
    const VariablePanel* panel; // null unless a dbn model is configured
    std::size_t first_oos; // first out-of-sample return index
    std::size_t n_oos;
};

FitOptions make_fit_options(const ExperimentConfig& cfg, const std::string& model_id,
                            std::size_t date_index, const std::optional<VolParams>& warm) {
    FitOptions opt;
    opt.mean_mode = cfg.mean_mode;
    opt.fixed_skewt = cfg.fixed_skewt;
    opt.seed = fnv1a(model_id, cfg.seed ^ 0x9e3779b97f4a7c15ull) ^ date_index;
    opt.warm_start = warm;
    return opt;
}

ModelRun run_stream(const StreamContext& ctx, const ModelVariant& model, bool stressed) {
    const ExperimentConfig& cfg = *ctx.config;
    const auto& rv = *ctx.returns;
    const auto& dates = *ctx.return_dates;
    const double alpha = 1.0 - cfg.confidence;
    const std::size_t W = cfg.window_length;
    const std::size_t k_order =
        static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(W)));

    ModelRun run;
    run.model = model;
    run.stressed = stressed;
    run.forecasts.reserve(ctx.n_oos);

    const std::string id = model.id();
    const VolModelSpec vol_spec{
        model.family == ModelFamily::arch1       ? VolKind::arch1
        : model.family == ModelFamily::garch11   ? VolKind::garch11
        : model.family == ModelFamily::egarch11  ? VolKind::egarch11
                                                 : VolKind::riskmetrics,
        model.innovation};

    // Stressed pools cover the full history before each forecast date.
    WorstPool pool(W);
    if (stressed)
        for (std::size_t i = 0; i < ctx.first_oos; ++i) pool.insert(rv[i], i);

    std::optional<VolParams> warm;
    std::uint64_t fitted_version = ~0ull;
    FittedVolModel cached_fit;
    bool have_cached = false;

    // DBN state.
    DbnStructure structure;
    GaussianDbn dbn_model;
    bool have_structure = false;
    LearnerParams learner{cfg.dbn.significance, cfg.dbn.max_condition};
    const int order = cfg.dbn.markov_order;

    double prev_var10 = 0.0;
    bool have_prev = false;

    for (std::size_t step = 0; step < ctx.n_oos; ++step) {
        const std::size_t j = ctx.first_oos + step; // forecast return index
        RiskForecast f;
        f.date = dates[j];
        f.model_id = id;
        f.horizon_days = cfg.horizon_days;
        f.confidence = cfg.confidence;
        f.stressed = stressed;

        try {
            double var_1d = 0.0;
            switch (model.family) {
            case ModelFamily::hs: {
                if (stressed) {
                    var_1d = -pool.kth_value(k_order);
                } else {
                    var_1d = hs_var(std::span(rv.data() + j - W, W), alpha);
                }
                break;
            }
            case ModelFamily::delta_normal: {
                if (stressed) {
                    const double s = std::sqrt(pool.sum_squares() / static_cast<double>(W));
                    if (!(s > 0.0)) throw DomainError("stressed pool has zero variance");
                    var_1d = -quantile(InnovationDist::normal(), alpha) * s;
                } else {
                    var_1d = delta_normal_var(std::span(rv.data() + j - W, W), alpha);
                }
                break;
            }
            case ModelFamily::arch1:
            case ModelFamily::garch11:
            case ModelFamily::egarch11:
            case ModelFamily::riskmetrics: {
                std::vector<double> stressed_members;
                std::span<const double> window;
                if (stressed) {
                    // Refit only when the collated membership changes; the
                    // members are treated as consecutive in date order.
                    if (!have_cached || fitted_version != pool.version()) {
                        stressed_members = pool.chronological_values();
                        window = stressed_members;
                    }
                } else {
                    window = std::span(rv.data() + j - W, W);
                }
                if (stressed && have_cached && fitted_version == pool.version()) {
                    var_1d = parametric_var(cached_fit, alpha);
                } else {
                    FittedVolModel m;
                    try {
                        m = fit(vol_spec, window, make_fit_options(cfg, id, j, warm));
                    } catch (const CalibrationError& e) {
                        m = e.best_iterate;
                        f.flags |= flag_nonconverged;
                    }
                    warm = m.params;
                    if (stressed) {
                        cached_fit = m;
                        have_cached = true;
                        fitted_version = pool.version();
                    }
                    var_1d = parametric_var(m, alpha);
                }
                break;
            }
            case ModelFamily::dbn: {
                if (!ctx.panel) throw InputError("dbn model requires a variable panel");
                const auto& panel = *ctx.panel;
                // Panel rows share the close indexing: close index j+1 is the
                // forecast date, so the training window ends at index j.
                const std::size_t last_row = j;
                const std::size_t first_row = j + 1 - W;
                const TwoSliceDataset slices = build_slices(
                    panel, panel.dates()[first_row], panel.dates()[last_row], order);
                if (!have_structure ||
                    step % static_cast<std::size_t>(cfg.dbn.structure_refresh_days) == 0) {
                    structure = learn_structure(slices, model.algo, learner);
                    have_structure = true;
                    run.structure_lines.push_back("# " + f.date.to_string());
                    for (const auto& line : structure.edge_list_text())
                        run.structure_lines.push_back(line);
                }
                dbn_model = fit_parameters(structure, slices);

                std::vector<double> evidence;
                evidence.reserve(panel.n_vars() * static_cast<std::size_t>(order));
                for (int lag = order; lag >= 1; --lag) {
                    const std::size_t row = last_row + 1 - static_cast<std::size_t>(lag);
                    for (std::size_t v = 0; v < panel.n_vars(); ++v)
                        evidence.push_back(panel.at(row, v));
                }
                const double predicted = forecast_one_step(dbn_model, evidence);
                const double last_close = (*ctx.closes)[last_row];
                const double fr = forecast_return(predicted, last_close);
                run.model_trace.push_back({f.date, predicted, fr});

                if (stressed) {
                    // Virtual insertion of the forecast into the worst pool.
                    const double kth = pool.kth_value(k_order);
                    double value = kth;
                    if (fr < kth) {
                        const double prev = k_order > 1 ? pool.kth_value(k_order - 1) : fr;
                        value = std::max(prev, fr);
                    }
                    var_1d = -value;
                } else {
                    var_1d = bn_var(std::span(rv.data() + j - W + 1, W - 1), fr, alpha);
                }
                break;
            }
            }
            if (!(var_1d > 0.0)) f.flags |= flag_nonpositive_var;
            f.var_fraction = scale_to_horizon(var_1d, cfg.horizon_days);
            prev_var10 = f.var_fraction;
            have_prev = true;
        } catch (const Error& e) {
            if (!have_prev)
                throw StagingError("model " + id + " failed on its first date " +
                                   f.date.to_string() + ": " + e.what());
            f.var_fraction = prev_var10;
            f.flags |= flag_carried_forward;
        }

        if (f.flags != flag_none) ++run.flagged_rows;
        run.forecasts.push_back(std::move(f));
        if (stressed) pool.insert(rv[j], j);
    }
    return run;
}

std::string zone_text(Zone z) { return to_string(z); }

} // namespace

std::string ModelVariant::id() const {
    switch (family) {
    case ModelFamily::hs:
    case ModelFamily::delta_normal: return family_name(family);
    case ModelFamily::dbn: return std::string("dbn-") + to_string(algo);
    default:
        return std::string(family_name(family)) +
               (innovation == DistKind::normal ? "-normal" : "-skewt");
    }
}

ModelVariant ModelVariant::parse(const std::string& id) {
    ModelVariant m;
    auto ends = [&](const std::string& suffix) {
        return id.size() > suffix.size() && id.compare(id.size() - suffix.size(), suffix.size(),
                                                       suffix) == 0;
    };
    if (id == "hs") {
        m.family = ModelFamily::hs;
        return m;
    }
    if (id == "delta-normal") {
        m.family = ModelFamily::delta_normal;
        return m;
    }
    if (id.rfind("dbn-", 0) == 0) {
        m.family = ModelFamily::dbn;
        const std::string algo = id.substr(4);
        if (algo == "pc-stable")
            m.algo = StructAlgo::pc_stable;
        else if (algo == "mmhc")
            m.algo = StructAlgo::mmhc;
        else if (algo == "si-hiton-pc")
            m.algo = StructAlgo::si_hiton_pc;
        else
            throw InputError("unknown dbn learner in model id '" + id + "'");
        return m;
    }
    std::string base = id;
    if (ends("-normal")) {
        m.innovation = DistKind::normal;
        base = id.substr(0, id.size() - 7);
    } else if (ends("-skewt")) {
        m.innovation = DistKind::skewed_t;
        base = id.substr(0, id.size() - 6);
    } else {
        throw InputError("model id '" + id + "' needs a -normal or -skewt suffix");
    }
    if (base == "arch1")
        m.family = ModelFamily::arch1;
    else if (base == "garch11")
        m.family = ModelFamily::garch11;
    else if (base == "egarch11")
        m.family = ModelFamily::egarch11;
    else if (base == "riskmetrics")
        m.family = ModelFamily::riskmetrics;
    else
        throw InputError("unknown model id '" + id + "'");
    return m;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("config parse failure (" + path + "): " + e.what());
    }
    ExperimentConfig cfg;
    try {
        cfg.manifest_path = doc.at("manifest").get<std::string>();
        cfg.window_length = doc.value("window_length", std::size_t{1264});
        cfg.horizon_days = doc.value("horizon_days", 10);
        cfg.confidence = doc.value("confidence", 0.99);
        for (const auto& m : doc.at("models")) cfg.models.push_back(ModelVariant::parse(m));
        if (doc.contains("measures")) {
            cfg.run_var = false;
            cfg.run_svar = false;
            for (const auto& m : doc["measures"]) {
                if (m == "var")
                    cfg.run_var = true;
                else if (m == "svar")
                    cfg.run_svar = true;
                else
                    throw InputError("unknown measure: " + m.get<std::string>());
            }
        }
        if (doc.contains("dbn")) {
            const auto& d = doc["dbn"];
            cfg.dbn.significance = d.value("significance", 0.05);
            cfg.dbn.max_condition = d.value("max_condition", 3);
            cfg.dbn.structure_refresh_days = d.value("structure_refresh_days", 1);
            cfg.dbn.markov_order = d.value("markov_order", 1);
        }
        cfg.parallelism = doc.value("parallelism", 0u);
        cfg.output_dir = doc.value("output_dir", std::string("out"));
        cfg.seed = doc.value("seed", std::uint64_t{0});
        cfg.mean_mode =
            doc.value("mean_mode", std::string("zero")) == "window-mean" ? MeanMode::window_mean
                                                                         : MeanMode::zero;
        cfg.mape_denominator = doc.value("mape_denominator", std::string("forecast")) == "actual"
                                   ? MapeDenominator::actual_return
                                   : MapeDenominator::forecast;
        if (doc.contains("innovation_params") && doc["innovation_params"].is_object()) {
            cfg.fixed_skewt = {doc["innovation_params"].at("nu").get<double>(),
                               doc["innovation_params"].at("xi").get<double>()};
        }
        if (doc.contains("out_of_sample_days"))
            cfg.out_of_sample_days = doc["out_of_sample_days"].get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("config schema failure (" + path + "): " + e.what());
    }
    // Paths resolve relative to the config file's directory.
    const auto base = std::filesystem::path(path).parent_path();
    if (!cfg.manifest_path.empty() && std::filesystem::path(cfg.manifest_path).is_relative())
        cfg.manifest_path = (base / cfg.manifest_path).string();
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (window_length < 250) throw InputError("config: window_length must be >= 250");
    if (!(confidence > 0.9 && confidence < 0.9999))
        throw InputError("config: confidence must lie in (0.9, 0.9999)");
    if (horizon_days < 1) throw InputError("config: horizon_days must be >= 1");
    if (dbn.structure_refresh_days < 1)
        throw InputError("config: dbn.structure_refresh_days must be >= 1");
    if (dbn.markov_order < 1) throw InputError("config: dbn.markov_order must be >= 1");
    if (!run_var && !run_svar) throw InputError("config: at least one measure required");
    if (out_of_sample_days && *out_of_sample_days < 1)
        throw InputError("config: out_of_sample_days must be >= 1");
}

std::string ExperimentConfig::canonical_text() const {
    nlohmann::json j;
    j["manifest"] = manifest_path;
    j["window_length"] = window_length;
    j["horizon_days"] = horizon_days;
    j["confidence"] = confidence;
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : models) ms.push_back(m.id());
    j["models"] = ms;
    j["measures"] = nlohmann::json::array();
    if (run_var) j["measures"].push_back("var");
    if (run_svar) j["measures"].push_back("svar");
    j["dbn"] = {{"significance", dbn.significance},
                {"max_condition", dbn.max_condition},
                {"structure_refresh_days", dbn.structure_refresh_days},
                {"markov_order", dbn.markov_order}};
    j["seed"] = seed;
    j["mean_mode"] = mean_mode == MeanMode::zero ? "zero" : "window-mean";
    j["mape_denominator"] =
        mape_denominator == MapeDenominator::forecast ? "forecast" : "actual";
    if (fixed_skewt) j["innovation_params"] = {{"nu", fixed_skewt->first}, {"xi", fixed_skewt->second}};
    if (out_of_sample_days) j["out_of_sample_days"] = *out_of_sample_days;
    return j.dump();
}

std::string config_hash(const ExperimentConfig& config) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.canonical_text())));
    return buf;
}

ReportBundle run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const PanelManifest manifest = PanelManifest::load(config.manifest_path);
    const std::string base_dir =
        std::filesystem::path(config.manifest_path).parent_path().string();

    const bool needs_panel = std::any_of(config.models.begin(), config.models.end(),
                                         [](const auto& m) { return m.family == ModelFamily::dbn; });

    // Target series (always required).
    const auto target_entry =
        std::find_if(manifest.variables.begin(), manifest.variables.end(),
                     [&](const auto& e) { return e.id == manifest.target_id; });
    const std::string target_path =
        (std::filesystem::path(base_dir) / target_entry->path).string();
    const PriceSeries prices = load_price_series(target_path, {}, manifest.target_id);
    const ReturnSeries returns = log_returns(prices);

    std::optional<VariablePanel> panel;
    if (needs_panel) panel = load_panel(manifest, base_dir);

    const std::size_t W = config.window_length;
    const std::size_t n_returns = returns.size();
    if (n_returns < 2 * W + 1) {
        const std::size_t have = n_returns > 2 * W ? n_returns - 2 * W : 0;
        (void)have;
        throw StagingError(
            "insufficient history: the first coverable forecast date would need " +
            std::to_string(2 * W) + " prior returns, but only " + std::to_string(n_returns) +
            " are available (first uncoverable date " +
            (returns.empty() ? std::string("n/a") : returns[0].date.to_string()) + ")");
    }
    const std::size_t first_oos = 2 * W;
    std::size_t n_oos = n_returns - first_oos;
    if (config.out_of_sample_days)
        n_oos = std::min<std::size_t>(n_oos, static_cast<std::size_t>(*config.out_of_sample_days));

    StreamContext ctx;
    ctx.config = &config;
    const std::vector<double> rv = returns.values();
    const std::vector<Date> rdates = returns.dates();
    const std::vector<double> closes = prices.values();
    ctx.returns = &rv;
    ctx.return_dates = &rdates;
    ctx.closes = &closes;
    ctx.panel = panel ? &*panel : nullptr;
    ctx.first_oos = first_oos;
    ctx.n_oos = n_oos;

    std::vector<std::pair<ModelVariant, bool>> tasks;
    for (const auto& m : config.models) {
        if (config.run_var) tasks.emplace_back(m, false);
        if (config.run_svar) tasks.emplace_back(m, true);
    }

    std::vector<ModelRun> runs(tasks.size());
    parallel_for(tasks.size(), resolve_parallelism(config.parallelism), [&](std::size_t i) {
        runs[i] = run_stream(ctx, tasks[i].first, tasks[i].second);
    });

    // Out-of-sample returns for evaluation.
    std::vector<ReturnPoint> oos_pts(returns.observations().begin() +
                                         static_cast<std::ptrdiff_t>(first_oos),
                                     returns.observations().begin() +
                                         static_cast<std::ptrdiff_t>(first_oos + n_oos));
    ReturnSeries oos(returns.id(), std::move(oos_pts));

    ReportBundle bundle;
    bundle.config = config;
    bundle.config_hash = config_hash(config);
    bundle.data_first = prices.front().date;
    bundle.data_last = prices.back().date;
    bundle.oos_first = oos[0].date;
    bundle.oos_last = oos[oos.size() - 1].date;

    const double p = 1.0 - config.confidence;
    for (auto& run : runs) {
        run.report = backtest(run.model.id(), run.stressed, run.forecasts, oos, p, 0.01,
                              config.mape_denominator);
        bundle.flagged_rows += run.flagged_rows;
        if (run.model.family == ModelFamily::dbn && !run.stressed) {
            auto& trace = bundle.dbn_traces[run.model.id()];
            trace = run.model_trace;
            auto& lines = bundle.structure_exports[run.model.id()];
            lines = run.structure_lines;
        }
    }
    bundle.runs = std::move(runs);
    bundle.oos_returns = std::move(oos);
    bundle.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return bundle;
}

void emit_report(const ReportBundle& bundle, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::exists(dir)) throw IoError("cannot create output directory: " + dir);

    // Per-model forecast files.
    std::set<std::string> written;
    for (const auto& model : bundle.config.models) {
        const std::string id = model.id();
        if (!written.insert(id).second) continue;
        std::vector<std::string> lines{"date,model_id,stressed,var_fraction"};
        for (bool stressed : {false, true}) {
            for (const auto& run : bundle.runs) {
                if (run.model.id() != id || run.stressed != stressed) continue;
                for (const auto& f : run.forecasts)
                    lines.push_back(f.date.to_string() + "," + id + "," +
                                    (stressed ? "1" : "0") + "," +
                                    csv::format_double(f.var_fraction));
            }
        }
        csv::write_lines((fs::path(dir) / ("forecasts_" + id + ".csv")).string(), lines);
    }

    // Flagged rows.
    {
        std::vector<std::string> lines{"date,model_id,stressed,flags"};
        for (const auto& run : bundle.runs)
            for (const auto& f : run.forecasts)
                if (f.flags != flag_none)
                    lines.push_back(f.date.to_string() + "," + run.model.id() + "," +
                                    (run.stressed ? "1" : "0") + "," + std::to_string(f.flags));
        csv::write_lines((fs::path(dir) / "flags.csv").string(), lines);
    }

    // Backtest summary.
    {
        std::vector<std::string> lines{
            "model_id,stressed,n_days,n_breaches,zone,kupiec_lr,kupiec_p,kupiec_reject,"
            "christoffersen_lr,christoffersen_p,christoffersen_reject,christoffersen_defined,"
            "mae,rmse,mape_pct,smape_pct,mape_defined,flagged_rows"};
        for (const auto& run : bundle.runs) {
            const auto& r = run.report;
            std::ostringstream os;
            os << r.model_id << ',' << (r.stressed ? 1 : 0) << ',' << r.n_days << ','
               << r.n_breaches << ',' << zone_text(r.zone) << ','
               << csv::format_double(r.kupiec.lr) << ',' << csv::format_double(r.kupiec.p_value)
               << ',' << (r.kupiec.reject ? 1 : 0) << ','
               << csv::format_double(r.christoffersen.lr) << ','
               << csv::format_double(r.christoffersen.p_value) << ','
               << (r.christoffersen.reject ? 1 : 0) << ',' << (r.christoffersen.defined ? 1 : 0)
               << ',' << csv::format_double(r.errors.mae) << ','
               << csv::format_double(r.errors.rmse) << ',' << csv::format_double(r.errors.mape)
               << ',' << csv::format_double(r.errors.smape) << ','
               << (r.errors.mape_defined ? 1 : 0) << ',' << run.flagged_rows;
            lines.push_back(os.str());
        }
        csv::write_lines((fs::path(dir) / "backtest_summary.csv").string(), lines);
    }

    // Human-readable grid mirroring the breach / error tables.
    {
        std::ostringstream os;
        auto find_run = [&](const std::string& id, bool stressed) -> const ModelRun* {
            for (const auto& run : bundle.runs)
                if (run.model.id() == id && run.stressed == stressed) return &run;
            return nullptr;
        };
        auto breach_cell = [&](const std::string& id, bool stressed) -> std::string {
            const ModelRun* r = find_run(id, stressed);
            return r ? std::to_string(r->report.n_breaches) : "-";
        };
        auto grid = [&](bool stressed) {
            os << (stressed ? "10-day 99% stressed VaR breaches\n" : "10-day 99% VaR breaches\n");
            os << "  Traditional models        Normal   Skewed-t\n";
            for (const char* fam : {"arch1", "garch11", "egarch11", "riskmetrics"}) {
                char row[96];
                std::snprintf(row, sizeof row, "  %-24s %7s %10s\n", fam,
                              breach_cell(std::string(fam) + "-normal", stressed).c_str(),
                              breach_cell(std::string(fam) + "-skewt", stressed).c_str());
                os << row;
            }
            os << "  Distribution agnostic\n";
            for (const char* fam : {"hs", "delta-normal"}) {
                char row[96];
                std::snprintf(row, sizeof row, "  %-24s %7s\n", fam,
                              breach_cell(fam, stressed).c_str());
                os << row;
            }
            os << "  BN models\n";
            for (const char* fam : {"dbn-mmhc", "dbn-pc-stable", "dbn-si-hiton-pc"}) {
                char row[96];
                std::snprintf(row, sizeof row, "  %-24s %7s\n", fam,
                              breach_cell(fam, stressed).c_str());
                os << row;
            }
            os << '\n';
            os << (stressed ? "Stressed VaR forecasting errors\n" : "VaR forecasting errors\n");
            os << "  model                          MAE      RMSE    MAPE%   SMAPE%\n";
            for (const auto& run : bundle.runs) {
                if (run.stressed != stressed) continue;
                char row[128];
                std::snprintf(row, sizeof row, "  %-26s %8.4f %8.4f %8.3f %8.3f\n",
                              run.model.id().c_str(), run.report.errors.mae,
                              run.report.errors.rmse, run.report.errors.mape,
                              run.report.errors.smape);
                os << row;
            }
            os << '\n';
        };
        bool any_var = false, any_svar = false;
        for (const auto& run : bundle.runs) (run.stressed ? any_svar : any_var) = true;
        if (any_var) grid(false);
        if (any_svar) grid(true);
        if (bundle.runs.empty()) os << "warning: empty model grid, metadata only\n";
        std::ofstream out(fs::path(dir) / "summary_tables.txt");
        out << os.str();
    }

    // Structure exports and forecast traces for the dbn models.
    for (const auto& [id, lines] : bundle.structure_exports)
        csv::write_lines((fs::path(dir) / ("structures_" + id + ".txt")).string(), lines);
    for (const auto& [id, trace] : bundle.dbn_traces) {
        std::vector<std::string> lines{"date,predicted_close,forecast_return"};
        for (const auto& row : trace)
            lines.push_back(row.date.to_string() + "," + csv::format_double(row.predicted_close) +
                            "," + csv::format_double(row.forecast_return));
        csv::write_lines((fs::path(dir) / ("dbn_trace_" + id + ".csv")).string(), lines);
    }

    // Out-of-sample returns for downstream backtests.
    {
        std::vector<std::string> lines{"date,value"};
        for (const auto& p : bundle.oos_returns.observations())
            lines.push_back(p.date.to_string() + "," + csv::format_double(p.value));
        csv::write_lines((fs::path(dir) / "oos_returns.csv").string(), lines);
    }

    // Run metadata.
    {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["config_hash"] = bundle.config_hash;
        j["config"] = nlohmann::json::parse(bundle.config.canonical_text());
        j["data_span"] = {bundle.data_first.to_string(), bundle.data_last.to_string()};
        j["out_of_sample_span"] = {bundle.oos_first.to_string(), bundle.oos_last.to_string()};
        j["out_of_sample_days"] = bundle.oos_returns.size();
        j["flagged_rows"] = bundle.flagged_rows;
        j["wall_clock_sec"] = bundle.wall_clock_sec;
        j["n_runs"] = bundle.runs.size();
        std::ofstream out(fs::path(dir) / "run_metadata.json");
        out << j.dump(2) << '\n';
    }
}

} // namespace riskcast
