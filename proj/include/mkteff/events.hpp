#pragma once

// Historical event annotations for chart overlays: ranged events shade an
// interval of months, point events mark a single month.

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mkteff/csv.hpp"
#include "mkteff/month.hpp"

namespace mkteff {

struct Event {
    Month start;
    std::optional<Month> end;  // absent => point event
    std::string label;

    [[nodiscard]] Month effective_end() const { return end ? *end : start; }
    [[nodiscard]] bool is_point() const { return !end; }
};

struct EventTable {
    std::vector<Event> rows;

    [[nodiscard]] bool empty() const { return rows.empty(); }
    [[nodiscard]] std::size_t size() const { return rows.size(); }
};

/// Parses `start,end,label` lines; `end` may be empty for a point event and
/// the label may itself contain commas. A leading `start,end,label` header
/// is tolerated; an empty stream yields an empty table.
inline EventTable load_events(std::istream& in) {
    EventTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line == "start,end,label") continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("events line " + std::to_string(lineno) +
                                        ": expected start,end,label");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string start_cell = trim(line.substr(0, c1));
        const std::string end_cell = trim(line.substr(c1 + 1, c2 - c1 - 1));
        const std::string label = trim(line.substr(c2 + 1));
        if (label.empty())
            throw std::invalid_argument("events line " + std::to_string(lineno) + ": empty label");
        Event ev;
        try {
            ev.start = parse_month(start_cell);
            if (!end_cell.empty()) ev.end = parse_month(end_cell);
        } catch (const std::exception& e) {
            throw std::invalid_argument("events line " + std::to_string(lineno) + ": " + e.what());
        }
        if (ev.end && *ev.end < ev.start)
            throw std::invalid_argument("events line " + std::to_string(lineno) + ": start " +
                                        ev.start.str() + " is after end " + ev.end->str());
        ev.label = label;
        table.rows.push_back(std::move(ev));
    }
    return table;
}

inline EventTable load_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open events file '" + path + "'");
    return load_events(in);
}

}  // namespace mkteff
