#pragma once

// Residual bootstrap under the efficient-market null: the null process is
// x*_t = alpha0_hat + eps*_t with eps* resampled i.i.d. from the centered
// residuals of the base time-varying fit. Pointwise band quantiles of the
// null distribution of zeta_t classify observed periods.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mkteff/month.hpp"
#include "mkteff/parallel.hpp"
#include "mkteff/rng.hpp"
#include "mkteff/series.hpp"
#include "mkteff/tvar.hpp"

namespace mkteff {

struct BandSeries {
    std::vector<Month> dates;
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.99;
    int reps = 0;
    std::uint64_t seed = 0;
    int failed = 0;  // replications whose refit failed or went non-finite
};

enum class EfficiencyFlag : std::uint8_t { efficient_consistent = 0, inefficient = 1, singular = 2 };

/// R type-7 (linear interpolation) quantile of an unsorted sample.
inline double quantile_type7(std::vector<double> v, double p) {
    if (v.empty()) throw std::invalid_argument("quantile_type7: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_type7: p outside [0,1]");
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = h - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

/// Draws one null-model sample of the original series length. Residuals are
/// centered before resampling, so the simulated mean is exactly alpha0.
inline ReturnSeries simulate_null_sample(const TvArFit& base, std::uint64_t sub_seed) {
    const long n_resid = base.residuals.size();
    if (n_resid == 0) throw std::invalid_argument("simulate_null_sample: empty residual pool");
    const long T = n_resid + base.q;
    std::vector<double> pool(static_cast<std::size_t>(n_resid));
    const double mean = base.residuals.mean();
    for (long i = 0; i < n_resid; ++i) pool[static_cast<std::size_t>(i)] = base.residuals(i) - mean;
    Rng gen(sub_seed);
    ReturnSeries out;
    out.id = "null-sample";
    const Month first = base.dates.front().plus(-base.q);
    out.dates.reserve(T);
    out.values.reserve(T);
    for (long t = 0; t < T; ++t) {
        out.dates.push_back(first.plus(static_cast<int>(t)));
        out.values.push_back(base.alpha0 + pool[bounded_index(gen(), pool.size())]);
    }
    return out;
}

/// Pointwise two-sided bootstrap bands for zeta under the null. Replication
/// r uses sub_seed(seed, r) and results aggregate by replication index, so
/// the bands are identical for any worker count. Aborts when more than 1% of
/// replications fail.
inline BandSeries bootstrap_bands(const ReturnSeries& returns, int q, double lambda, int reps,
                                  double level, std::uint64_t seed,
                                  unsigned threads = default_thread_count()) {
    if (reps < 100) throw std::invalid_argument("bootstrap_bands: reps must be >= 100");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_bands: level must be inside (0,1)");
    const TvArFit base = fit_tvar(returns, q, lambda);
    const long t_eff = base.paths.rows();

    std::vector<double> draws(static_cast<std::size_t>(reps) * t_eff);
    std::vector<std::uint8_t> ok(reps, 0);
    std::atomic<int> failures{0};
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t r) {
        double* slot = &draws[r * static_cast<std::size_t>(t_eff)];
        try {
            ReturnSeries sample = simulate_null_sample(base, sub_seed(seed, r));
            TvArFit refit = fit_tvar(sample, q, lambda);
            DegreeSeries deg = efficiency_degree(refit);
            bool finite = true;
            for (long t = 0; t < t_eff; ++t) {
                slot[t] = deg.zeta[static_cast<std::size_t>(t)];
                finite = finite && std::isfinite(slot[t]);
            }
            if (!finite) throw std::runtime_error("non-finite degree");
            ok[r] = 1;
        } catch (...) {
            failures.fetch_add(1, std::memory_order_relaxed);
        }
    });

    const int failed = failures.load();
    if (failed * 100 > reps)
        throw std::runtime_error("bootstrap_bands: " + std::to_string(failed) + " of " +
                                 std::to_string(reps) + " replications failed");
    BandSeries out;
    out.dates = base.dates;
    out.level = level;
    out.reps = reps;
    out.seed = seed;
    out.failed = failed;
    out.lower.resize(t_eff);
    out.upper.resize(t_eff);
    const double lo_p = (1.0 - level) / 2.0;
    const double hi_p = 1.0 - lo_p;
    std::vector<double> column;
    column.reserve(reps);
    for (long t = 0; t < t_eff; ++t) {
        column.clear();
        for (int r = 0; r < reps; ++r)
            if (ok[static_cast<std::size_t>(r)])
                column.push_back(draws[static_cast<std::size_t>(r) * t_eff + t]);
        out.lower[t] = quantile_type7(column, lo_p);
        out.upper[t] = quantile_type7(column, hi_p);
    }
    return out;
}

/// Flags periods whose observed degree exceeds the upper band (strict
/// inequality); singular periods pass through.
inline std::vector<EfficiencyFlag> classify_efficiency(const DegreeSeries& degree,
                                                       const BandSeries& bands) {
    if (degree.dates.size() != bands.dates.size() ||
        (!degree.dates.empty() && (degree.dates.front() != bands.dates.front() ||
                                   degree.dates.back() != bands.dates.back())))
        throw std::invalid_argument("classify_efficiency: misaligned dates");
    std::vector<EfficiencyFlag> flags(degree.zeta.size(), EfficiencyFlag::efficient_consistent);
    for (std::size_t t = 0; t < degree.zeta.size(); ++t) {
        if (degree.singular_flags[t])
            flags[t] = EfficiencyFlag::singular;
        else if (degree.zeta[t] > bands.upper[t])
            flags[t] = EfficiencyFlag::inefficient;
    }
    return flags;
}

}  // namespace mkteff
