#pragma once

// Calendar months as (year, month) pairs. All series in this library are
// monthly; there is deliberately no day component.

#include <charconv>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mkteff {

/// A calendar month, e.g. 1923-09. Comparable, hashable via index().
struct Month {
    int year = 0;
    int mon = 1;  // 1..12

    friend auto operator<=>(const Month&, const Month&) = default;

    /// Months since year 0, January = 0. Consecutive months differ by 1.
    [[nodiscard]] int index() const { return year * 12 + (mon - 1); }

    [[nodiscard]] static Month from_index(int idx) {
        int y = idx / 12;
        int m = idx % 12;
        if (m < 0) {
            m += 12;
            --y;
        }
        return Month{y, m + 1};
    }

    /// The month `n` steps later (negative = earlier).
    [[nodiscard]] Month plus(int n) const { return from_index(index() + n); }

    /// Signed month count from `other` to *this.
    [[nodiscard]] int diff(const Month& other) const { return index() - other.index(); }

    /// Formats as zero-padded "YYYY-MM".
    [[nodiscard]] std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, mon);
        return std::string(buf);
    }
};

/// Parses "YYYY-MM" (exactly four digits, dash, two digits).
/// Throws std::invalid_argument on any deviation.
inline Month parse_month(std::string_view text) {
    auto fail = [&] {
        throw std::invalid_argument("malformed month '" + std::string(text) +
                                    "': expected YYYY-MM");
    };
    if (text.size() != 7 || text[4] != '-') fail();
    int y = 0, m = 0;
    auto [py, ey] = std::from_chars(text.data(), text.data() + 4, y);
    auto [pm, em] = std::from_chars(text.data() + 5, text.data() + 7, m);
    if (ey != std::errc{} || em != std::errc{} || py != text.data() + 4 ||
        pm != text.data() + 7)
        fail();
    if (m < 1 || m > 12) fail();
    return Month{y, m};
}

}  // namespace mkteff
