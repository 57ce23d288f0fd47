#pragma once

// Monthly price series, log-return series, and descriptive statistics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mkteff/month.hpp"

namespace mkteff {

/// Contiguous monthly price levels. Invariants: dates strictly increasing
/// with no gaps, all values > 0, length >= 2.
struct PriceSeries {
    std::string id;
    std::vector<Month> dates;
    std::vector<double> values;

    PriceSeries(std::string id_, std::vector<Month> dates_, std::vector<double> values_)
        : id(std::move(id_)), dates(std::move(dates_)), values(std::move(values_)) {
        validate();
    }

    [[nodiscard]] std::size_t size() const { return values.size(); }

  private:
    void validate() const {
        if (dates.size() != values.size())
            throw std::invalid_argument("series '" + id + "': dates/values length mismatch");
        if (values.size() < 2)
            throw std::invalid_argument("series '" + id + "': need at least 2 observations");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] > 0.0) || !std::isfinite(values[i]))
                throw std::invalid_argument("series '" + id + "': non-positive price at " +
                                            dates[i].str());
            if (i > 0) {
                int step = dates[i].diff(dates[i - 1]);
                if (step == 0)
                    throw std::invalid_argument("series '" + id + "': duplicate month " +
                                                dates[i].str());
                if (step != 1)
                    throw std::invalid_argument("series '" + id + "': month gap, missing " +
                                                dates[i - 1].plus(1).str());
            }
        }
    }
};

/// Monthly log returns: values[t] = ln p_{t+1} - ln p_t, dated by the later
/// month of each adjacent pair.
struct ReturnSeries {
    std::string id;
    std::vector<Month> dates;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

struct DescriptiveStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, n-1 denominator
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

inline ReturnSeries log_returns(const PriceSeries& prices) {
    ReturnSeries out;
    out.id = prices.id;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    out.values.resize(prices.size() - 1);
    for (std::size_t t = 0; t + 1 < prices.size(); ++t)
        out.values[t] = std::log(prices.values[t + 1]) - std::log(prices.values[t]);
    return out;
}

/// Two-pass moments; permutation-invariant in everything it reports.
inline DescriptiveStats describe(const ReturnSeries& returns) {
    const auto& v = returns.values;
    if (v.empty()) throw std::invalid_argument("describe: empty series");
    DescriptiveStats s;
    s.n = v.size();
    double sum = 0.0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

}  // namespace mkteff
