#pragma once

// Delimited-table input for monthly price data and exact-round-trip numeric
// CSV output. Header row required; date column ISO "YYYY-MM".

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mkteff/month.hpp"
#include "mkteff/series.hpp"

namespace mkteff {

/// Shortest decimal representation that round-trips the exact double.
inline std::string fmt_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, p);
}

inline std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    for (auto& f : out) {
        while (!f.empty() && (f.back() == '\r' || f.back() == ' ' || f.back() == '\t'))
            f.pop_back();
        std::size_t i = 0;
        while (i < f.size() && (f[i] == ' ' || f[i] == '\t')) ++i;
        f.erase(0, i);
    }
    return out;
}

inline bool is_missing_cell(std::string_view cell) {
    if (cell.empty()) return true;
    std::string low(cell);
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return low == "na" || low == "nan" || low == "null";
}

inline double parse_cell_double(std::string_view cell, const std::string& context) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || p != cell.data() + cell.size())
        throw std::invalid_argument("malformed number '" + std::string(cell) + "' " + context);
    return v;
}

struct TableSpec {
    std::vector<std::string> columns;      // value columns to extract
    char delimiter = ',';
    std::string date_column = "date";
    std::optional<Month> from;             // inclusive window, optional
    std::optional<Month> to;
};

/// Loads one PriceSeries per requested column. Rows are sorted by date;
/// contiguity and positivity are enforced by the PriceSeries constructor.
/// Missing cells are hard errors inside the selected window.
inline std::vector<PriceSeries> load_price_table(std::istream& in, const TableSpec& spec) {
    if (spec.columns.empty()) throw std::invalid_argument("no columns selected");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty table: missing header");
    auto header = split_line(line, spec.delimiter);
    auto col_index = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw std::invalid_argument("column '" + name + "' not found in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t date_idx = col_index(spec.date_column);
    std::vector<std::size_t> value_idx;
    value_idx.reserve(spec.columns.size());
    for (const auto& c : spec.columns) value_idx.push_back(col_index(c));

    struct Row {
        Month date;
        std::vector<std::string> cells;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line, spec.delimiter);
        if (cells.size() != header.size())
            throw std::invalid_argument("row " + std::to_string(lineno) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(cells.size()));
        Month d = parse_month(cells[date_idx]);
        if (spec.from && d < *spec.from) continue;
        if (spec.to && *spec.to < d) continue;
        rows.push_back(Row{d, std::move(cells)});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.date < b.date; });

    std::vector<PriceSeries> out;
    out.reserve(spec.columns.size());
    for (std::size_t k = 0; k < spec.columns.size(); ++k) {
        std::vector<Month> dates;
        std::vector<double> values;
        dates.reserve(rows.size());
        values.reserve(rows.size());
        for (const auto& r : rows) {
            const std::string& cell = r.cells[value_idx[k]];
            if (is_missing_cell(cell))
                throw std::invalid_argument("series '" + spec.columns[k] +
                                            "': missing price at " + r.date.str());
            values.push_back(
                parse_cell_double(cell, "in column '" + spec.columns[k] + "' at " + r.date.str()));
            dates.push_back(r.date);
        }
        out.emplace_back(spec.columns[k], std::move(dates), std::move(values));
    }
    return out;
}

}  // namespace mkteff
