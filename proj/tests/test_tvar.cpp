#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "mkteff/ar.hpp"
#include "mkteff/month.hpp"
#include "mkteff/series.hpp"
#include "mkteff/tvar.hpp"

using namespace mkteff;
using Catch::Matchers::WithinAbs;

namespace {

ReturnSeries series_from(const std::vector<double>& values) {
    ReturnSeries s;
    s.id = "syn";
    for (std::size_t i = 0; i < values.size(); ++i) s.dates.push_back(Month{1900, 1}.plus(int(i)));
    s.values = values;
    return s;
}

const std::vector<double> kSmall = {
    -0.042375775728236934, -0.011523183651151746, -0.065155572132077913, -0.1032440634237384,
    -0.0076747461489079724, -0.024553667910959125, 0.051524298238022022, 0.041345797640755917,
    -0.08855760103617602, -0.054523857493485262, -0.075288919360675305, -0.046239430471350887,
    -0.012027117411370022, 0.036898216806606626};

// Dense oracle: materialize the augmented system straight from its
// mathematical definition and solve with Eigen's dense QR.
struct DenseSolution {
    double alpha0;
    Eigen::MatrixXd paths;  // t_eff x q
};

DenseSolution dense_oracle(const std::vector<double>& x, int q, double lambda) {
    const long T = static_cast<long>(x.size());
    const long te = T - q;
    const long nb = static_cast<long>(q) * te;
    const long N = nb + 1;
    const long rows = te + (te - 1) * q;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, N);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    long r = 0;
    for (long t = q; t < T; ++t, ++r) {
        const long s = t - q;
        for (int j = 1; j <= q; ++j) A(r, s * q + (j - 1)) = x[t - j];
        A(r, N - 1) = 1.0;
        b(r) = x[t];
    }
    const double w = std::sqrt(lambda);
    for (long s = 1; s < te; ++s)
        for (int j = 0; j < q; ++j, ++r) {
            A(r, (s - 1) * q + j) = -w;
            A(r, s * q + j) = w;
        }
    Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    DenseSolution out;
    out.alpha0 = sol(N - 1);
    out.paths.resize(te, q);
    for (long s = 0; s < te; ++s)
        for (int j = 0; j < q; ++j) out.paths(s, j) = sol(s * q + j);
    return out;
}

}  // namespace

TEST_CASE("build_stacked_system: dimensions and weights") {
    SECTION("q=1, T=4: four unknowns, two penalty rows") {
        auto s = series_from({0.1, -0.2, 0.15, 0.05});
        auto sys = build_stacked_system(s, 1, 1.0);
        CHECK(sys.n_unknowns == 4);
        CHECK(sys.t_eff == 3);
        long penalties = 0;
        for (const auto& row : sys.rows)
            if (row.tail == 0.0) ++penalties;
        CHECK(penalties == 2);
        CHECK(sys.rows.size() == 5);
    }
    SECTION("q=4, T=775: dimension 3085") {
        std::vector<double> v(775);
        std::mt19937_64 gen(1);
        std::normal_distribution<double> nd(0.0, 0.1);
        for (auto& e : v) e = nd(gen);
        auto sys = build_stacked_system(series_from(v), 4, 1.0);
        CHECK(sys.n_unknowns == 3085);
    }
    SECTION("lambda = 1 gives unit penalty weight") {
        auto sys = build_stacked_system(series_from({0.1, -0.2, 0.15, 0.05, 0.0, 0.1}), 1, 1.0);
        for (const auto& row : sys.rows)
            if (row.tail == 0.0) {
                CHECK(row.band.front() == -1.0);
                CHECK(row.band.back() == 1.0);
            }
    }
    SECTION("validation") {
        auto s = series_from({0.1, -0.2, 0.15, 0.05});
        CHECK_THROWS_AS(build_stacked_system(s, 0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(build_stacked_system(s, 1, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(build_stacked_system(s, 2, 1.0), std::invalid_argument);
    }
}

TEST_CASE("fit_tvar matches frozen reference values (T=14, q=2, lambda=0.7)") {
    auto fit = fit_tvar(series_from(kSmall), 2, 0.7);
    CHECK_THAT(fit.alpha0, WithinAbs(-0.0280285666456619, 1e-10));
    REQUIRE(fit.paths.rows() == 12);
    REQUIRE(fit.paths.cols() == 2);
    CHECK_THAT(fit.paths(0, 0), WithinAbs(0.319429351353307, 1e-9));
    CHECK_THAT(fit.paths(0, 1), WithinAbs(-0.257722383519425, 1e-9));
    CHECK_THAT(fit.paths(5, 0), WithinAbs(0.312578798754533, 1e-9));
    CHECK_THAT(fit.paths(5, 1), WithinAbs(-0.270429653052792, 1e-9));
    CHECK_THAT(fit.paths(11, 0), WithinAbs(0.313342638660131, 1e-9));
    CHECK_THAT(fit.paths(11, 1), WithinAbs(-0.277678057458373, 1e-9));
    REQUIRE(fit.residuals.size() == 12);
    CHECK_THAT(fit.residuals(0), WithinAbs(-0.0443673483313694, 1e-9));
    CHECK_THAT(fit.residuals(6), WithinAbs(-0.0594080418528969, 1e-9));
    CHECK_THAT(fit.residuals(11), WithinAbs(0.0558557169261562, 1e-9));
    CHECK(fit.dates.front() == Month{1900, 3});
    CHECK(fit.dates.back() == Month{1901, 2});

    auto deg = efficiency_degree(fit);
    CHECK_THAT(deg.zeta[0], WithinAbs(0.0657651348975985, 1e-9));
    CHECK_THAT(deg.zeta[5], WithinAbs(0.044003871283928, 1e-9));
    CHECK_THAT(deg.zeta[11], WithinAbs(0.0369835852821861, 1e-9));
}

TEST_CASE("fit_tvar agrees with the dense-QR oracle on random instances") {
    std::mt19937_64 gen(555);
    std::normal_distribution<double> nd(0.0, 0.1);
    for (int rep = 0; rep < 6; ++rep) {
        const int q = 1 + rep % 3;
        const int T = 25 + static_cast<int>(gen() % 16);
        const double lambda = std::array{0.25, 1.0, 4.0}[rep % 3];
        std::vector<double> x(T);
        for (auto& v : x) v = 0.01 + nd(gen);
        auto fit = fit_tvar(series_from(x), q, lambda);
        auto oracle = dense_oracle(x, q, lambda);
        CHECK_THAT(fit.alpha0, WithinAbs(oracle.alpha0, 1e-9));
        for (long s = 0; s < fit.paths.rows(); ++s)
            for (int j = 0; j < q; ++j)
                CHECK_THAT(fit.paths(s, j), WithinAbs(oracle.paths(s, j), 1e-9));
    }
}

TEST_CASE("collapse property: huge lambda reproduces the time-invariant fit") {
    std::mt19937_64 gen(321);
    std::normal_distribution<double> nd(0.0, 0.05);
    for (int q : {1, 2}) {
        std::vector<double> x(150);
        double prev = 0.0;
        for (auto& v : x) {
            v = 0.001 + 0.3 * prev + nd(gen);
            prev = v;
        }
        auto s = series_from(x);
        auto tv = fit_tvar(s, q, 1e12);
        auto ar = fit_ar_ols(s, q);
        for (long t = 0; t < tv.paths.rows(); ++t)
            for (int j = 0; j < q; ++j)
                CHECK_THAT(tv.paths(t, j), WithinAbs(ar.alpha(j + 1), 1e-6));
        CHECK_THAT(tv.alpha0, WithinAbs(ar.alpha(0), 1e-6));
    }
}

TEST_CASE("zero-noise AR(1) recursion yields a constant path at the truth") {
    std::vector<double> x(60);
    x[0] = 0.5;
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = 0.02 + 0.6 * x[t - 1];
    auto fit = fit_tvar(series_from(x), 1, 1e12);
    for (long t = 0; t < fit.paths.rows(); ++t)
        CHECK_THAT(fit.paths(t, 0), WithinAbs(0.6, 1e-6));
    CHECK_THAT(fit.alpha0, WithinAbs(0.02, 1e-6));
}

TEST_CASE("interpolation property: tiny lambda fits each observation") {
    // q=1 with regressors bounded away from zero: each data row can be
    // satisfied exactly, so residuals vanish as lambda -> 0.
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    std::vector<double> x(40);
    for (auto& v : x) v = u(gen);
    auto fit = fit_tvar(series_from(x), 1, 1e-12);
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("scale identity: (k x, k^2 lambda) gives identical slopes and degree") {
    std::mt19937_64 gen(2468);
    std::normal_distribution<double> nd(0.0, 0.1);
    std::vector<double> x(120);
    double prev = 0.0;
    for (auto& v : x) {
        v = 0.4 * prev + nd(gen);
        prev = v;
    }
    const double k = 2.0;
    std::vector<double> kx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) kx[i] = k * x[i];
    auto base = fit_tvar(series_from(x), 2, 1.0);
    auto scaled = fit_tvar(series_from(kx), 2, k * k * 1.0);
    CHECK_THAT(scaled.alpha0, WithinAbs(k * base.alpha0, 1e-8));
    for (long t = 0; t < base.paths.rows(); ++t)
        for (int j = 0; j < 2; ++j)
            CHECK_THAT(scaled.paths(t, j), WithinAbs(base.paths(t, j), 1e-8));
    auto d1 = efficiency_degree(base);
    auto d2 = efficiency_degree(scaled);
    for (std::size_t t = 0; t < d1.zeta.size(); ++t)
        CHECK_THAT(d2.zeta[t], WithinAbs(d1.zeta[t], 1e-8));
}

TEST_CASE("gradient of the penalized objective vanishes at the solution") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> nd(0.0, 0.08);
    std::vector<double> x(80);
    for (auto& v : x) v = nd(gen);
    const int q = 2;
    const double lambda = 1.0;
    auto fit = fit_tvar(series_from(x), q, lambda);
    auto sys = build_stacked_system(series_from(x), q, lambda);
    const long N = sys.n_unknowns;
    Eigen::VectorXd sol(N);
    for (long s = 0; s < fit.paths.rows(); ++s)
        for (int j = 0; j < q; ++j) sol(s * q + j) = fit.paths(s, j);
    sol(N - 1) = fit.alpha0;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(N);
    double res_norm2 = 0.0, a_norm2 = 0.0;
    for (const auto& row : sys.rows) {
        double r = -row.rhs + row.tail * sol(N - 1);
        for (std::size_t k = 0; k < row.band.size(); ++k) {
            if (row.lead_col + static_cast<long>(k) < N - 1)
                r += row.band[k] * sol(row.lead_col + static_cast<long>(k));
            a_norm2 += row.band[k] * row.band[k];
        }
        a_norm2 += row.tail * row.tail;
        res_norm2 += r * r;
        for (std::size_t k = 0; k < row.band.size(); ++k)
            if (row.lead_col + static_cast<long>(k) < N - 1)
                grad(row.lead_col + static_cast<long>(k)) += 2.0 * row.band[k] * r;
        grad(N - 1) += 2.0 * row.tail * r;
    }
    const double scale = 2.0 * std::sqrt(a_norm2) * std::sqrt(res_norm2);
    CHECK(grad.cwiseAbs().maxCoeff() < 1e-8 * std::max(scale, 1.0));
}

TEST_CASE("constant series is singular") {
    std::vector<double> x(50, 0.25);
    CHECK_THROWS_AS(fit_tvar(series_from(x), 1, 1.0), std::runtime_error);
    CHECK_THROWS_AS(fit_tvar(series_from(x), 2, 1.0), std::runtime_error);
    std::vector<double> z(50, 0.0);
    CHECK_THROWS_AS(fit_tvar(series_from(z), 1, 1.0), std::runtime_error);
}

TEST_CASE("efficiency_degree: identities and singular flagging") {
    TvArFit fit;
    fit.q = 2;
    fit.paths = Eigen::MatrixXd::Zero(5, 2);
    for (int i = 0; i < 5; ++i) fit.dates.push_back(Month{1920, 1}.plus(i));
    SECTION("all-zero coefficients give zero degree") {
        auto d = efficiency_degree(fit);
        for (double z : d.zeta) CHECK(z == 0.0);
        for (auto f : d.singular_flags) CHECK(f == 0);
    }
    SECTION("sum 0.5 gives degree 1") {
        fit.paths.col(0).setConstant(0.3);
        fit.paths.col(1).setConstant(0.2);
        auto d = efficiency_degree(fit);
        for (double z : d.zeta) CHECK_THAT(z, WithinAbs(1.0, 1e-12));
    }
    SECTION("sum exactly 1 is flagged singular, not overflowed") {
        fit.paths.col(0).setConstant(0.75);
        fit.paths.col(1).setConstant(0.25);
        auto d = efficiency_degree(fit);
        for (std::size_t t = 0; t < d.zeta.size(); ++t) {
            CHECK(d.singular_flags[t] == 1);
            CHECK(std::isnan(d.zeta[t]));
        }
    }
    SECTION("published-table arithmetic: (0.3486, -0.1734) gives 0.2124") {
        fit.paths.col(0).setConstant(0.3486);
        fit.paths.col(1).setConstant(-0.1734);
        auto d = efficiency_degree(fit);
        CHECK_THAT(d.zeta[0], WithinAbs(0.1752 / 0.8248, 1e-12));
        CHECK_THAT(d.zeta[0], WithinAbs(0.2124, 5e-5));
    }
    SECTION("negative sums produce nonnegative degree") {
        fit.paths.col(0).setConstant(-0.4);
        fit.paths.col(1).setConstant(-0.1);
        auto d = efficiency_degree(fit);
        for (double z : d.zeta) CHECK_THAT(z, WithinAbs(0.5 / 1.5, 1e-12));
    }
    SECTION("tol must be positive") {
        CHECK_THROWS_AS(efficiency_degree(fit, 0.0), std::invalid_argument);
    }
}
