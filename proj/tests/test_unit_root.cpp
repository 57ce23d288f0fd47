#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "mkteff/month.hpp"
#include "mkteff/series.hpp"
#include "mkteff/unit_root.hpp"

using namespace mkteff;
using Catch::Matchers::WithinAbs;

namespace {

// Fixed 60-observation series; all expected values below were computed by an
// independent reference implementation and frozen.
const std::vector<double> kFixed = {
    -0.042375775728236934, -0.011523183651151746, -0.065155572132077913, -0.1032440634237384,
    -0.0076747461489079724, -0.024553667910959125, 0.051524298238022022, 0.041345797640755917,
    -0.08855760103617602, -0.054523857493485262, -0.075288919360675305, -0.046239430471350887,
    -0.012027117411370022, 0.036898216806606626, -0.059573251184468476, -0.085903491982654456,
    -0.058372148035027702, -0.082942331005807585, -0.082728582609891216, -0.012123135591197771,
    -0.090506509696156617, -0.10377153492980466, 0.074895523911150702, -0.062389033538627722,
    -0.084147878322024944, -0.032943564057405304, -0.05402296590680853, -0.0040366926174529305,
    -0.010435677077445934, 0.038799513783173915, 0.0062330206548955533, 0.058029346260438208,
    0.022205031238382657, -0.0012365859963201515, -0.020704909248248523, -0.0032484405981765651,
    0.028129221205605365, 0.0067576624782640102, 0.041600672385268156, 0.046772162826402779,
    0.0316467127556486, 0.0048998141980884265, -0.045731822388605153, -0.06970042652576873,
    0.012753509524480414, 0.066605812434982176, -0.063409227671799184, 0.077399412144645185,
    0.015780246683401129, -0.027649718150157414, -0.019860319747743431, -0.095320939094290208,
    -0.09917237053775238, -0.014865718202382215, -0.025376115420965892, 0.017708395685451697,
    0.000764213476819443, 0.057973288788657117, -0.037240304056595334, -0.020978305530997773};

ReturnSeries make_series(const std::vector<double>& values) {
    ReturnSeries s;
    s.id = "fixed";
    for (std::size_t i = 0; i < values.size(); ++i) s.dates.push_back(Month{1900, 1}.plus(int(i)));
    s.values = values;
    return s;
}

// Test-local exhaustive evaluation of the modified criterion, written with
// straight loops and a hand-rolled normal-equations solve so it shares no
// code path with the library.
std::vector<double> oracle_mic(const std::vector<double>& yd, int pmax, bool aic) {
    const long T = static_cast<long>(yd.size());
    const long ne = T - pmax - 1;
    double ssq = 0.0;
    for (long t = pmax + 1; t < T; ++t) ssq += yd[t - 1] * yd[t - 1];
    std::vector<double> crits;
    for (int p = 0; p <= pmax; ++p) {
        const int k = p + 1;
        std::vector<std::vector<double>> A(k, std::vector<double>(k, 0.0));
        std::vector<double> b(k, 0.0);
        auto reg = [&](long t, int j) -> double {
            return j == 0 ? yd[t - 1] : yd[t - j] - yd[t - j - 1];
        };
        for (long t = pmax + 1; t < T; ++t)
            for (int i = 0; i < k; ++i) {
                b[i] += reg(t, i) * yd[t];
                for (int j = 0; j < k; ++j) A[i][j] += reg(t, i) * reg(t, j);
            }
        // gaussian elimination
        std::vector<double> x(k);
        for (int c = 0; c < k; ++c) {
            int piv = c;
            for (int r = c + 1; r < k; ++r)
                if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
            std::swap(A[c], A[piv]);
            std::swap(b[c], b[piv]);
            for (int r = c + 1; r < k; ++r) {
                double f = A[r][c] / A[c][c];
                for (int j = c; j < k; ++j) A[r][j] -= f * A[c][j];
                b[r] -= f * b[c];
            }
        }
        for (int i = k; i-- > 0;) {
            double s = b[i];
            for (int j = i + 1; j < k; ++j) s -= A[i][j] * x[j];
            x[i] = s / A[i][i];
        }
        double rss = 0.0;
        for (long t = pmax + 1; t < T; ++t) {
            double fit = 0.0;
            for (int j = 0; j < k; ++j) fit += x[j] * reg(t, j);
            rss += (yd[t] - fit) * (yd[t] - fit);
        }
        const double s2 = rss / static_cast<double>(ne);
        const double b0 = x[0] - 1.0;
        const double tau = b0 * b0 * ssq / s2;
        const double ct = aic ? 2.0 : std::log(static_cast<double>(ne));
        crits.push_back(std::log(s2) + ct * (tau + p) / static_cast<double>(ne));
    }
    return crits;
}

int oracle_argmin(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

}  // namespace

TEST_CASE("gls_detrend removes an exact linear trend") {
    ReturnSeries s;
    s.id = "lin";
    for (int i = 0; i < 50; ++i) {
        s.dates.push_back(Month{1900, 1}.plus(i));
        s.values.push_back(3.0 + 0.5 * (i + 1));
    }
    auto d = gls_detrend(s, DetrendModel::constant_trend);
    for (double v : d.values) CHECK_THAT(v, WithinAbs(0.0, 1e-8));
    CHECK_THAT(d.phi_hat(0), WithinAbs(3.0, 1e-8));
    CHECK_THAT(d.phi_hat(1), WithinAbs(0.5, 1e-10));
    CHECK(d.c_bar == -13.5);
}

TEST_CASE("gls_detrend matches frozen reference values") {
    auto s = make_series(kFixed);
    SECTION("constant+trend") {
        auto d = gls_detrend(s, DetrendModel::constant_trend);
        REQUIRE(d.phi_hat.size() == 2);
        CHECK_THAT(d.phi_hat(0), WithinAbs(-0.0409909347941494, 1e-12));
        CHECK_THAT(d.phi_hat(1), WithinAbs(0.000656126014888515, 1e-14));
        CHECK_THAT(d.values[0], WithinAbs(-0.00204096694897605, 1e-12));
        CHECK_THAT(d.values[7], WithinAbs(0.0770877243157972, 1e-12));
        CHECK_THAT(d.values[59], WithinAbs(-0.0193549316301593, 1e-12));
    }
    SECTION("constant") {
        auto d = gls_detrend(s, DetrendModel::constant);
        REQUIRE(d.phi_hat.size() == 1);
        CHECK(d.c_bar == -7.0);
        CHECK_THAT(d.phi_hat(0), WithinAbs(-0.0307223520528425, 1e-12));
        CHECK_THAT(d.values[0], WithinAbs(-0.0116534236753945, 1e-12));
        CHECK_THAT(d.values[7], WithinAbs(0.0720681496935984, 1e-12));
        CHECK_THAT(d.values[59], WithinAbs(0.00974404652184468, 1e-12));
    }
}

TEST_CASE("ols_detrend: frozen coefficients and exact orthogonality") {
    auto s = make_series(kFixed);
    auto d = ols_detrend(s, DetrendModel::constant_trend);
    CHECK_THAT(d.phi_hat(0), WithinAbs(-0.0415794483897684, 1e-12));
    CHECK_THAT(d.phi_hat(1), WithinAbs(0.000728925050281166, 1e-14));
    double sum = 0.0, tsum = 0.0;
    for (std::size_t t = 0; t < d.values.size(); ++t) {
        sum += d.values[t];
        tsum += static_cast<double>(t + 1) * d.values[t];
    }
    CHECK_THAT(sum, WithinAbs(0.0, 1e-10));
    CHECK_THAT(tsum, WithinAbs(0.0, 1e-8));
}

TEST_CASE("adf_regression matches frozen reference statistics") {
    auto s = make_series(kFixed);
    auto trend = gls_detrend(s, DetrendModel::constant_trend);
    auto r0 = adf_regression(trend.values, 0);
    CHECK_THAT(r0.statistic, WithinAbs(-6.15624119472, 1e-8));
    CHECK_THAT(r0.rho_hat, WithinAbs(0.208258335196, 1e-9));
    auto r1 = adf_regression(trend.values, 1);
    CHECK_THAT(r1.statistic, WithinAbs(-4.7109866559, 1e-8));
    CHECK_THAT(r1.rho_hat, WithinAbs(0.206073506632, 1e-9));
    auto r2 = adf_regression(trend.values, 2);
    CHECK_THAT(r2.statistic, WithinAbs(-3.57564812807, 1e-8));
    CHECK_THAT(r2.rho_hat, WithinAbs(0.280341091016, 1e-9));

    auto cons = gls_detrend(s, DetrendModel::constant);
    auto c0 = adf_regression(cons.values, 0);
    CHECK_THAT(c0.statistic, WithinAbs(-5.6165026155, 1e-8));
    CHECK_THAT(c0.rho_hat, WithinAbs(0.29556843224, 1e-9));
}

TEST_CASE("select_lag: criterion values match frozen reference") {
    auto s = make_series(kFixed);
    auto d = gls_detrend(s, DetrendModel::constant_trend);
    std::vector<double> crits;
    int k = select_lag(d, 6, LagCriterion::mbic, &crits);
    REQUIRE(crits.size() == 7);
    CHECK_THAT(crits[0], WithinAbs(-3.3906110059, 1e-8));
    CHECK_THAT(crits[1], WithinAbs(-3.3138850207, 1e-8));
    CHECK_THAT(crits[2], WithinAbs(-3.8429880738, 1e-8));
    CHECK_THAT(crits[3], WithinAbs(-2.2898831802, 1e-8));
    CHECK(k == 6);  // frozen: this short sample legitimately prefers the deep lag
    std::vector<double> acrit;
    int ka = select_lag(d, 6, LagCriterion::maic, &acrit);
    CHECK_THAT(acrit[0], WithinAbs(-4.7412920961, 1e-8));
    CHECK(ka == 6);
}

TEST_CASE("select_lag agrees with the exhaustive oracle on random inputs") {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        DetrendedSeries d;
        d.values.resize(180);
        for (auto& v : d.values) v = nd(gen);
        for (auto crit : {LagCriterion::mbic, LagCriterion::maic}) {
            std::vector<double> got;
            int k = select_lag(d, 8, crit, &got);
            auto expect = oracle_mic(d.values, 8, crit == LagCriterion::maic);
            REQUIRE(got.size() == expect.size());
            for (std::size_t i = 0; i < got.size(); ++i)
                CHECK_THAT(got[i], WithinAbs(expect[i], 1e-8));
            CHECK(k == oracle_argmin(expect));
        }
    }
}

TEST_CASE("select_lag: white-noise example at the pinned seed picks zero") {
    // The criterion value at p=0 is minimal for this fixed draw; asserted
    // against the exhaustive oracle.
    std::mt19937_64 gen(23);
    std::normal_distribution<double> nd(0.0, 1.0);
    DetrendedSeries d;
    d.values.resize(500);
    for (auto& v : d.values) v = nd(gen);
    std::vector<double> crits;
    int k = select_lag(d, 12, LagCriterion::mbic, &crits);
    CHECK(k == 0);
    auto expect = oracle_mic(d.values, 12, false);
    CHECK(oracle_argmin(expect) == 0);
    for (std::size_t i = 0; i < crits.size(); ++i)
        CHECK(crits[0] <= crits[i]);
}

TEST_CASE("select_lag trivial and error cases") {
    DetrendedSeries d;
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd(0.0, 1.0);
    d.values.resize(30);
    for (auto& v : d.values) v = nd(gen);
    CHECK(select_lag(d, 0, LagCriterion::mbic) == 0);
    DetrendedSeries tiny;
    tiny.values = {1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(select_lag(tiny, 8, LagCriterion::mbic), std::invalid_argument);
}

TEST_CASE("default p_max follows the Schwert rule") {
    CHECK(default_p_max(100) == 12);
    CHECK(default_p_max(254) == 15);
    CHECK(default_p_max(500) == 17);
}

TEST_CASE("critical values table") {
    CHECK(adf_gls_critical(DetrendModel::constant_trend, 1) == -3.42);
    CHECK(adf_gls_critical(DetrendModel::constant_trend, 5) == -2.89);
    CHECK(adf_gls_critical(DetrendModel::constant_trend, 10) == -2.57);
    CHECK(adf_gls_critical(DetrendModel::constant, 1) == -2.58);
    CHECK(adf_gls_critical(DetrendModel::constant, 5) == -1.95);
    CHECK(adf_gls_critical(DetrendModel::constant, 10) == -1.62);
    CHECK_THROWS_AS(adf_gls_critical(DetrendModel::constant, 2), std::invalid_argument);
}

TEST_CASE("adf_gls_test: frozen composition on the fixed series") {
    auto s = make_series(kFixed);
    auto r = adf_gls_test(s, 6, LagCriterion::mbic, DetrendModel::constant_trend);
    CHECK(r.lag == 6);
    CHECK_THAT(r.statistic, WithinAbs(-2.07753753757, 1e-8));
    CHECK_THAT(r.rho_hat, WithinAbs(0.395248220177, 1e-9));
    CHECK(r.critical_1pct == -3.42);
    CHECK(r.reject_1pct == (r.statistic < r.critical_1pct));
    CHECK(r.lag <= r.p_max);
    REQUIRE(r.phi_hat.size() == 2);
    CHECK_THAT(r.phi_hat(0), WithinAbs(-0.0409909347941494, 1e-12));

    auto rc = adf_gls_test(s, 6, LagCriterion::mbic, DetrendModel::constant);
    CHECK(rc.lag == 6);
    CHECK_THAT(rc.statistic, WithinAbs(-1.45836756473, 1e-8));
    CHECK_THAT(rc.rho_hat, WithinAbs(0.648602640372, 1e-9));
}

TEST_CASE("adf_gls_test rejects stationary noise, not a random walk") {
    // Two spot-checked seeds; the acceptance suite covers ten.
    for (unsigned seed : {11u, 17u}) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        std::vector<double> level(400);
        double acc = 0.0;
        for (auto& v : level) {
            acc += nd(gen);
            v = acc;
        }
        ReturnSeries lev;
        ReturnSeries dif;
        for (int i = 0; i < 400; ++i) {
            lev.dates.push_back(Month{1900, 1}.plus(i));
            lev.values.push_back(level[i]);
            if (i > 0) {
                dif.dates.push_back(lev.dates.back());
                dif.values.push_back(level[i] - level[i - 1]);
            }
        }
        auto rl = adf_gls_test(lev);
        auto rd = adf_gls_test(dif);
        INFO("seed " << seed << " level stat " << rl.statistic << " diff stat " << rd.statistic);
        CHECK_FALSE(rl.reject_1pct);
        CHECK(rd.reject_1pct);
    }
}

TEST_CASE("adf_gls_test validates inputs") {
    ReturnSeries tiny;
    for (int i = 0; i < 6; ++i) {
        tiny.dates.push_back(Month{1900, 1}.plus(i));
        tiny.values.push_back(0.1 * i);
    }
    CHECK_THROWS_AS(adf_gls_test(tiny, 8), std::invalid_argument);
}
