// Command-line front end: `mkteff analyze` runs the full market-efficiency
// pipeline on a monthly price-index CSV and writes tables, tidy CSVs, SVG
// charts, and a reproducibility manifest into the output directory.
//
// Settings may come from a plain key=value config file (--config); values
// given as command-line flags always take precedence over the file.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mkteff/pipeline.hpp"

namespace {

std::vector<mkteff::SeriesSelection> parse_columns(const std::vector<std::string>& items) {
    std::vector<mkteff::SeriesSelection> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        mkteff::SeriesSelection sel;
        sel.column = item.substr(0, eq);
        if (eq != std::string::npos) sel.label = item.substr(eq + 1);
        if (sel.column.empty())
            throw std::invalid_argument("missing column name in selector '" + item + "'");
        out.push_back(std::move(sel));
    }
    return out;
}

std::vector<std::string> split_csv_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

/// `key = value` lines; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(stripped.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(stripped.substr(eq + 1));
    }
    return kv;
}

void print_summary(const mkteff::ReportBundle& bundle, std::ostream& os) {
    for (const auto& r : bundle.reports) {
        if (!r.ok) continue;
        std::size_t inefficient = 0;
        for (auto f : r.flags) inefficient += f == mkteff::EfficiencyFlag::inefficient;
        char line[512];
        std::snprintf(line, sizeof(line),
                      "%s: N=%zu mean=%.4f sd=%.4f | ADF-GLS=%.4f (lag %d) | order=%d "
                      "L_C=%.4f | inefficient %zu/%zu periods",
                      r.label.c_str(), r.stats.n, r.stats.mean, r.stats.sd,
                      r.unit_root.statistic, r.unit_root.lag, r.ar.q, r.lc.statistic, inefficient,
                      r.flags.size());
        os << line << '\n';
    }
    if (!bundle.config.out_dir.empty())
        os << "wrote " << bundle.outputs.size() << " files to " << bundle.config.out_dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying stock market efficiency toolkit"};
    app.require_subcommand(1);

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Estimate time-varying market efficiency from a monthly price-index CSV");

    std::string config_path, input, out_dir, events_path, date_column = "date", delimiter = ",";
    std::string from_str, to_str, criterion = "mbic", detrend = "trend";
    std::vector<std::string> column_items;
    int q_max = 8, p_max = -1, reps = 10000;
    unsigned threads = 0;
    double lambda = 1.0, level = 0.99;
    std::uint64_t seed = 12345;

    analyze->add_option("--config", config_path,
                        "Plain-text key=value settings file; flags take precedence");
    analyze->add_option("--input", input, "Input CSV with a date column (YYYY-MM)");
    analyze->add_option("--columns", column_items,
                        "Price-index columns to analyze, each as column[=label]")
        ->delimiter(',');
    analyze->add_option("--date-column", date_column, "Name of the date column")
        ->capture_default_str();
    analyze->add_option("--delimiter", delimiter, "Field delimiter (single character)")
        ->capture_default_str();
    analyze->add_option("--from", from_str, "Window start YYYY-MM (inclusive)");
    analyze->add_option("--to", to_str, "Window end YYYY-MM (inclusive)");
    analyze->add_option("--q-max", q_max, "Maximum autoregression order for SBIC selection")
        ->capture_default_str();
    analyze->add_option("--p-max", p_max, "Maximum unit-root lag (negative = sample-size rule)")
        ->capture_default_str();
    analyze->add_option("--criterion", criterion, "Unit-root lag criterion (mbic or maic)")
        ->check(CLI::IsMember({"mbic", "maic"}))
        ->capture_default_str();
    analyze
        ->add_option("--detrend", detrend, "Unit-root detrending: trend (constant+trend) or const")
        ->check(CLI::IsMember({"trend", "const"}))
        ->capture_default_str();
    analyze->add_option("--lambda", lambda, "Smoothness penalty of the time-varying fit")
        ->capture_default_str();
    analyze->add_option("--reps", reps, "Bootstrap replications (>= 100)")->capture_default_str();
    analyze->add_option("--level", level, "Confidence level in (0,1)")->capture_default_str();
    analyze->add_option("--seed", seed, "Master random seed")->capture_default_str();
    analyze->add_option("--events", events_path, "Optional events CSV (start,end,label)");
    analyze->add_option("--out", out_dir, "Output directory");
    analyze->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            auto kv = read_config_file(config_path);
            auto take = [&](const char* key, auto&& apply) {
                const auto it = kv.find(key);
                if (it == kv.end()) return;
                if (analyze->count(std::string("--") + key) == 0) apply(it->second);
                kv.erase(it);
            };
            take("input", [&](const std::string& v) { input = v; });
            take("columns", [&](const std::string& v) { column_items = split_csv_list(v); });
            take("date-column", [&](const std::string& v) { date_column = v; });
            take("delimiter", [&](const std::string& v) { delimiter = v; });
            take("from", [&](const std::string& v) { from_str = v; });
            take("to", [&](const std::string& v) { to_str = v; });
            take("q-max", [&](const std::string& v) { q_max = std::stoi(v); });
            take("p-max", [&](const std::string& v) { p_max = std::stoi(v); });
            take("criterion", [&](const std::string& v) { criterion = v; });
            take("detrend", [&](const std::string& v) { detrend = v; });
            take("lambda", [&](const std::string& v) { lambda = std::stod(v); });
            take("reps", [&](const std::string& v) { reps = std::stoi(v); });
            take("level", [&](const std::string& v) { level = std::stod(v); });
            take("seed", [&](const std::string& v) { seed = std::stoull(v); });
            take("events", [&](const std::string& v) { events_path = v; });
            take("out", [&](const std::string& v) { out_dir = v; });
            take("threads", [&](const std::string& v) {
                threads = static_cast<unsigned>(std::stoul(v));
            });
            if (!kv.empty())
                throw std::invalid_argument("unknown config key '" + kv.begin()->first + "'");
            if (criterion != "mbic" && criterion != "maic")
                throw std::invalid_argument("criterion must be mbic or maic");
            if (detrend != "trend" && detrend != "const")
                throw std::invalid_argument("detrend must be trend or const");
        }
        if (input.empty()) throw std::invalid_argument("--input is required (flag or config)");
        if (column_items.empty())
            throw std::invalid_argument("--columns is required (flag or config)");
        if (out_dir.empty()) throw std::invalid_argument("--out is required (flag or config)");
        if (delimiter.size() != 1)
            throw std::invalid_argument("--delimiter must be a single character");

        mkteff::PipelineConfig config;
        config.input_path = input;
        config.columns = parse_columns(column_items);
        config.date_column = date_column;
        config.delimiter = delimiter[0];
        if (!from_str.empty()) config.from = mkteff::parse_month(from_str);
        if (!to_str.empty()) config.to = mkteff::parse_month(to_str);
        config.q_max = q_max;
        config.p_max = p_max;
        config.criterion =
            criterion == "maic" ? mkteff::LagCriterion::maic : mkteff::LagCriterion::mbic;
        config.detrend = detrend == "const" ? mkteff::DetrendModel::constant
                                            : mkteff::DetrendModel::constant_trend;
        config.lambda = lambda;
        config.reps = reps;
        config.level = level;
        config.seed = seed;
        config.events_path = events_path;
        config.out_dir = out_dir;
        config.threads = threads;

        const mkteff::ReportBundle bundle = mkteff::run_pipeline(config);
        print_summary(bundle, std::cout);
        bool any_failed = false;
        for (const auto& r : bundle.reports) {
            if (r.ok) continue;
            any_failed = true;
            std::cerr << "error: series=" << r.id << " stage=" << r.error_stage << ": "
                      << r.error_message << '\n';
        }
        return any_failed ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: stage=setup: " << e.what() << '\n';
        return 2;
    }
}
