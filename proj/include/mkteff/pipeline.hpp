#pragma once

// End-to-end orchestration: load prices, compute per-series statistics and
// time-varying efficiency with bootstrap bands, and emit tables, tidy CSVs,
// charts, and a reproducibility manifest. A failing stage aborts only its
// own series; the bundle records the stage and message for diagnostics.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkteff/ar.hpp"
#include "mkteff/bootstrap.hpp"
#include "mkteff/csv.hpp"
#include "mkteff/events.hpp"
#include "mkteff/format.hpp"
#include "mkteff/parallel.hpp"
#include "mkteff/rng.hpp"
#include "mkteff/series.hpp"
#include "mkteff/svg.hpp"
#include "mkteff/tvar.hpp"
#include "mkteff/unit_root.hpp"

namespace mkteff {

struct SeriesSelection {
    std::string column;
    std::string label;  // defaults to the column name

    [[nodiscard]] const std::string& display() const { return label.empty() ? column : label; }
};

struct PipelineConfig {
    std::string input_path;
    std::vector<SeriesSelection> columns;
    std::string date_column = "date";
    char delimiter = ',';
    std::optional<Month> from;
    std::optional<Month> to;
    int q_max = 8;
    int p_max = -1;  // negative => sample-size rule
    LagCriterion criterion = LagCriterion::mbic;
    DetrendModel detrend = DetrendModel::constant_trend;
    double lambda = 1.0;
    int reps = 10000;
    double level = 0.99;
    std::uint64_t seed = 12345;
    std::string events_path;  // optional
    std::string out_dir;      // empty => compute only, emit nothing
    unsigned threads = 0;     // 0 => hardware concurrency
};

struct SeriesReport {
    std::string id;
    std::string label;
    bool ok = false;
    std::string error_stage;
    std::string error_message;

    ReturnSeries returns;
    DescriptiveStats stats;
    UnitRootResult unit_root;
    ArFit ar;
    LcResult lc;
    double cumulative_sum = std::numeric_limits<double>::quiet_NaN();
    TvArFit tvar;
    DegreeSeries degree;
    BandSeries bands;
    std::vector<EfficiencyFlag> flags;
};

struct ReportBundle {
    PipelineConfig config;
    std::uint64_t input_digest = 0;
    EventTable events;
    std::vector<SeriesReport> reports;
    std::vector<std::string> outputs;  // emitted file names, sorted

    [[nodiscard]] bool all_ok() const {
        for (const auto& r : reports)
            if (!r.ok) return false;
        return true;
    }
};

inline const char* flag_name(EfficiencyFlag f) {
    switch (f) {
        case EfficiencyFlag::inefficient: return "inefficient";
        case EfficiencyFlag::singular: return "singular";
        default: return "efficient-consistent";
    }
}

inline const char* criterion_name(LagCriterion c) {
    return c == LagCriterion::mbic ? "mbic" : "maic";
}

inline const char* detrend_name(DetrendModel m) {
    return m == DetrendModel::constant_trend ? "trend" : "const";
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace pipeline_detail {

inline std::string sanitize_name(const std::string& id) {
    std::string out;
    for (char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')
                   ? c
                   : '_';
    return out.empty() ? std::string("series") : out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline std::string degree_csv(const SeriesReport& r) {
    std::string out = "date,zeta,lower,upper,flag\n";
    for (std::size_t t = 0; t < r.degree.zeta.size(); ++t) {
        out += r.degree.dates[t].str();
        out += ',';
        out += fmt_double(r.degree.zeta[t]);
        out += ',';
        out += fmt_double(r.bands.lower[t]);
        out += ',';
        out += fmt_double(r.bands.upper[t]);
        out += ',';
        out += flag_name(r.flags[t]);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json series_results_json(const SeriesReport& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["ok"] = r.ok;
    if (!r.ok) {
        j["error"] = {{"stage", r.error_stage}, {"message", r.error_message}};
        return j;
    }
    j["descriptive"] = {{"mean", r.stats.mean}, {"sd", r.stats.sd},   {"min", r.stats.min},
                        {"max", r.stats.max},   {"n", r.stats.n}};
    std::vector<double> phi(r.unit_root.phi_hat.data(),
                            r.unit_root.phi_hat.data() + r.unit_root.phi_hat.size());
    j["unit_root"] = {{"statistic", r.unit_root.statistic},
                      {"lag", r.unit_root.lag},
                      {"rho_hat", r.unit_root.rho_hat},
                      {"detrend_coefficients", phi},
                      {"criterion", criterion_name(r.unit_root.criterion)},
                      {"model", detrend_name(r.unit_root.model)},
                      {"p_max", r.unit_root.p_max},
                      {"critical_1pct", r.unit_root.critical_1pct},
                      {"reject_1pct", r.unit_root.reject_1pct}};
    std::vector<double> coef(r.ar.alpha.data(), r.ar.alpha.data() + r.ar.alpha.size());
    std::vector<double> se;
    for (long k = 0; k < r.ar.alpha.size(); ++k) se.push_back(std::sqrt(r.ar.hac_cov(k, k)));
    j["ar"] = {{"order", r.ar.q},
               {"coefficients", coef},
               {"hac_se", se},
               {"adj_r2", r.ar.adj_r2},
               {"sbic", r.ar.sbic},
               {"nw_bandwidth", r.ar.nw_bandwidth},
               {"n_used", r.ar.n_used},
               {"cumulative_sum", r.cumulative_sum}};
    j["constancy"] = {{"statistic", r.lc.statistic},
                      {"n_params", r.lc.n_params},
                      {"critical_1pct", r.lc.critical_1pct},
                      {"reject_1pct", r.lc.reject_1pct}};
    std::size_t singular = 0, inefficient = 0;
    for (auto f : r.flags) {
        singular += f == EfficiencyFlag::singular;
        inefficient += f == EfficiencyFlag::inefficient;
    }
    j["efficiency"] = {{"periods", r.degree.zeta.size()},
                       {"from", r.degree.dates.empty() ? "" : r.degree.dates.front().str()},
                       {"to", r.degree.dates.empty() ? "" : r.degree.dates.back().str()},
                       {"inefficient_periods", inefficient},
                       {"singular_periods", singular}};
    j["bands"] = {{"level", r.bands.level},
                  {"reps", r.bands.reps},
                  {"seed", r.bands.seed},
                  {"failed_replications", r.bands.failed}};
    return j;
}

}  // namespace pipeline_detail

/// Writes all artifacts for a computed bundle into config.out_dir and fills
/// bundle.outputs. Throws on any filesystem failure.
inline void emit_outputs(ReportBundle& bundle) {
    namespace fs = std::filesystem;
    using namespace pipeline_detail;
    const fs::path dir = bundle.config.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    bundle.outputs.clear();
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(dir / name, content);
        bundle.outputs.push_back(name);
    };

    std::vector<SummaryColumn> cols;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (const auto& r : bundle.reports) {
        results.push_back(series_results_json(r));
        if (!r.ok) continue;
        cols.push_back(SummaryColumn{r.label, r.stats, r.unit_root, r.ar, r.lc, r.cumulative_sum});
        const std::string stem = sanitize_name(r.id);
        emit(stem + "_degree.csv", degree_csv(r));
        emit(stem + "_degree.svg",
             render_degree_chart(r.degree, r.bands, bundle.events,
                                 r.label + ": time-varying market efficiency"));
        emit(stem + "_returns.svg",
             render_returns_chart(r.returns, bundle.events, r.label + ": monthly log returns"));
    }
    emit("tables.txt", render_summary_tables(cols));
    emit("results.json", results.dump(2) + "\n");

    std::sort(bundle.outputs.begin(), bundle.outputs.end());
    nlohmann::ordered_json manifest;
    manifest["artifact"] = "mkteff";
    manifest["format_version"] = 1;
    manifest["input"] = {{"path", bundle.config.input_path},
                         {"fnv1a64", hex64(bundle.input_digest)},
                         {"date_column", bundle.config.date_column},
                         {"delimiter", std::string(1, bundle.config.delimiter)},
                         {"from", bundle.config.from ? bundle.config.from->str() : ""},
                         {"to", bundle.config.to ? bundle.config.to->str() : ""}};
    nlohmann::ordered_json sel = nlohmann::ordered_json::array();
    for (const auto& c : bundle.config.columns)
        sel.push_back({{"column", c.column}, {"label", c.display()}});
    manifest["config"] = {{"columns", sel},
                          {"q_max", bundle.config.q_max},
                          {"p_max", bundle.config.p_max},
                          {"criterion", criterion_name(bundle.config.criterion)},
                          {"detrend", detrend_name(bundle.config.detrend)},
                          {"lambda", bundle.config.lambda},
                          {"reps", bundle.config.reps},
                          {"level", bundle.config.level},
                          {"seed", bundle.config.seed},
                          {"events", bundle.config.events_path}};
    nlohmann::ordered_json status = nlohmann::ordered_json::array();
    for (const auto& r : bundle.reports) {
        nlohmann::ordered_json s{{"id", r.id}, {"status", r.ok ? "ok" : "error"}};
        if (!r.ok) {
            s["stage"] = r.error_stage;
            s["message"] = r.error_message;
        } else {
            s["bands_seed"] = r.bands.seed;
        }
        status.push_back(s);
    }
    manifest["series"] = status;
    manifest["outputs"] = bundle.outputs;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    bundle.outputs.push_back("manifest.json");
    std::sort(bundle.outputs.begin(), bundle.outputs.end());
}

/// Runs the full analysis for every selected column. Input/config problems
/// throw; per-series numerical failures are recorded and the other series
/// continue.
inline ReportBundle run_pipeline(const PipelineConfig& config) {
    using namespace pipeline_detail;
    if (config.columns.empty()) throw std::invalid_argument("run_pipeline: no columns selected");
    if (config.reps < 100) throw std::invalid_argument("run_pipeline: reps must be >= 100");
    if (!(config.level > 0.0 && config.level < 1.0))
        throw std::invalid_argument("run_pipeline: level must be inside (0,1)");
    if (config.q_max < 1) throw std::invalid_argument("run_pipeline: q_max must be >= 1");
    if (config.from && config.to && *config.to < *config.from)
        throw std::invalid_argument("run_pipeline: window is empty (from > to)");

    ReportBundle bundle;
    bundle.config = config;

    const std::string raw = read_file(config.input_path);
    bundle.input_digest = fnv1a64(raw);

    TableSpec spec;
    for (const auto& c : config.columns) spec.columns.push_back(c.column);
    spec.delimiter = config.delimiter;
    spec.date_column = config.date_column;
    spec.from = config.from;
    spec.to = config.to;
    std::istringstream stream(raw);
    const std::vector<PriceSeries> prices = load_price_table(stream, spec);

    if (!config.events_path.empty()) bundle.events = load_events(config.events_path);

    const unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;
    for (std::size_t i = 0; i < prices.size(); ++i) {
        SeriesReport r;
        r.id = config.columns[i].column;
        r.label = config.columns[i].display();
        std::string stage;
        try {
            stage = "returns";
            r.returns = log_returns(prices[i]);
            stage = "describe";
            r.stats = describe(r.returns);
            stage = "unit-root";
            r.unit_root = adf_gls_test(r.returns, config.p_max, config.criterion, config.detrend);
            stage = "order-select";
            const int order = select_order_sbic(r.returns, config.q_max);
            stage = "ar-fit";
            r.ar = fit_ar_ols(r.returns, order);
            stage = "constancy";
            r.lc = hansen_constancy_test(r.ar);
            r.cumulative_sum = cumulative_ar_sum(r.ar);
            stage = "tvar-fit";
            r.tvar = fit_tvar(r.returns, order, config.lambda);
            stage = "degree";
            r.degree = efficiency_degree(r.tvar);
            stage = "bootstrap";
            r.bands = bootstrap_bands(r.returns, order, config.lambda, config.reps, config.level,
                                      sub_seed(config.seed, i), threads);
            stage = "classify";
            r.flags = classify_efficiency(r.degree, r.bands);
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error_stage = stage;
            r.error_message = e.what();
        }
        bundle.reports.push_back(std::move(r));
    }

    if (!config.out_dir.empty()) emit_outputs(bundle);
    return bundle;
}

}  // namespace mkteff
