#pragma once

// Plain-text summary tables rendered for human readers: values rounded to
// 4 decimals, one column per analyzed series.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "mkteff/ar.hpp"
#include "mkteff/series.hpp"
#include "mkteff/unit_root.hpp"

namespace mkteff {

/// %.4f with the "-0.0000" artifact normalized away.
inline std::string fmt_fixed4(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

/// One analyzed series' summary numbers, decoupled from pipeline plumbing.
struct SummaryColumn {
    std::string label;
    DescriptiveStats stats;
    UnitRootResult unit_root;
    ArFit ar;
    LcResult lc;
    double cumulative_sum = 0.0;
};

namespace format_detail {

inline std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
    std::size_t ncol = 0;
    for (const auto& r : rows) ncol = std::max(ncol, r.size());
    std::vector<std::size_t> widths(ncol, 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) widths[c] = std::max(widths[c], r[c].size());
    std::ostringstream out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t c = 0; c < ncol; ++c) {
            const std::string& cell = c < r.size() ? r[c] : std::string();
            if (c == 0) {
                line += cell;
                line.append(widths[0] - cell.size(), ' ');
            } else {
                line += "  ";
                line.append(widths[c] - cell.size(), ' ');
                line += cell;
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << '\n';
    }
    return out.str();
}

}  // namespace format_detail

/// Descriptive statistics and unit-root block (one column per series).
inline std::string render_stats_table(const std::vector<SummaryColumn>& cols) {
    using format_detail::render_grid;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{""};
    for (const auto& c : cols) header.push_back(c.label);
    rows.push_back(header);
    auto push_row = [&](const std::string& name, auto getter) {
        std::vector<std::string> r{name};
        for (const auto& c : cols) r.push_back(getter(c));
        rows.push_back(std::move(r));
    };
    push_row("Mean", [](const SummaryColumn& c) { return fmt_fixed4(c.stats.mean); });
    push_row("SD", [](const SummaryColumn& c) { return fmt_fixed4(c.stats.sd); });
    push_row("Min", [](const SummaryColumn& c) { return fmt_fixed4(c.stats.min); });
    push_row("Max", [](const SummaryColumn& c) { return fmt_fixed4(c.stats.max); });
    push_row("ADF-GLS", [](const SummaryColumn& c) { return fmt_fixed4(c.unit_root.statistic); });
    push_row("Lags", [](const SummaryColumn& c) { return std::to_string(c.unit_root.lag); });
    push_row("phi_hat", [](const SummaryColumn& c) { return fmt_fixed4(c.unit_root.rho_hat); });
    push_row("N", [](const SummaryColumn& c) { return std::to_string(c.stats.n); });

    std::ostringstream out;
    out << "Descriptive statistics and unit-root tests\n";
    out << "==========================================\n";
    out << render_grid(rows);
    if (!cols.empty()) {
        const auto& ur = cols.front().unit_root;
        out << "\nNotes: ADF-GLS with "
            << (ur.model == DetrendModel::constant_trend ? "a constant and a linear trend"
                                                         : "a constant only")
            << "; lag order by " << (ur.criterion == LagCriterion::mbic ? "MBIC" : "MAIC")
            << "; 1% critical value " << fmt_fixed4(ur.critical_1pct)
            << ".\nphi_hat is the lagged-level coefficient of the test regression; N counts "
               "return observations.\n";
    }
    return out.str();
}

/// Autoregression estimates with bracketed HAC standard errors, adjusted R2,
/// and the parameter-constancy statistic.
inline std::string render_ar_table(const std::vector<SummaryColumn>& cols) {
    using format_detail::render_grid;
    int max_q = 0;
    for (const auto& c : cols) max_q = std::max(max_q, c.ar.q);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{""};
    for (const auto& c : cols) header.push_back(c.label);
    rows.push_back(header);

    auto coef_rows = [&](const std::string& name, int j) {
        std::vector<std::string> value{name}, se{""};
        for (const auto& c : cols) {
            if (j <= c.ar.q) {
                value.push_back(fmt_fixed4(c.ar.alpha(j)));
                se.push_back("[" + fmt_fixed4(std::sqrt(c.ar.hac_cov(j, j))) + "]");
            } else {
                value.push_back("-");
                se.push_back("-");
            }
        }
        rows.push_back(std::move(value));
        rows.push_back(std::move(se));
    };
    coef_rows("Constant", 0);
    for (int j = 1; j <= max_q; ++j) coef_rows("R_{t-" + std::to_string(j) + "}", j);
    auto push_row = [&](const std::string& name, auto getter) {
        std::vector<std::string> r{name};
        for (const auto& c : cols) r.push_back(getter(c));
        rows.push_back(std::move(r));
    };
    push_row("adj R^2", [](const SummaryColumn& c) { return fmt_fixed4(c.ar.adj_r2); });
    push_row("L_C", [](const SummaryColumn& c) { return fmt_fixed4(c.lc.statistic); });
    push_row("Order (SBIC)", [](const SummaryColumn& c) { return std::to_string(c.ar.q); });
    push_row("Sum of AR coefficients",
             [](const SummaryColumn& c) { return fmt_fixed4(c.cumulative_sum); });

    std::ostringstream out;
    out << "Autoregression estimates and parameter-constancy tests\n";
    out << "=======================================================\n";
    out << render_grid(rows);
    out << "\nNotes: Newey-West standard errors in brackets; L_C tests joint constancy of all "
           "coefficients and the error variance (1% critical value depends on the parameter "
           "count).\n";
    return out.str();
}

inline std::string render_summary_tables(const std::vector<SummaryColumn>& cols) {
    return render_stats_table(cols) + "\n" + render_ar_table(cols);
}

}  // namespace mkteff
