#pragma once

// Time-invariant AR(q) baseline: least-squares fit, Schwarz-criterion order
// selection, Newey-West standard errors, Hansen parameter-constancy test,
// and the cumulative AR coefficient sum.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mkteff/linreg.hpp"
#include "mkteff/series.hpp"

namespace mkteff {

struct ArFit {
    int q = 0;
    Eigen::VectorXd alpha;       // (alpha0, alpha1..alphaq)
    Eigen::VectorXd residuals;   // length T - q
    Eigen::MatrixXd hac_cov;     // (q+1) x (q+1)
    double adj_r2 = 0.0;
    double sbic = 0.0;
    long n_used = 0;             // T - q
    int nw_bandwidth = 0;
    Eigen::MatrixXd regressors;  // design matrix, kept for score-based tests
    Eigen::MatrixXd xtx_inv;
};

struct LcResult {
    double statistic = 0.0;
    int n_params = 0;  // q + 2: intercept, slopes, error variance
    double critical_1pct = 0.0;
    bool reject_1pct = false;
};

namespace detail {

inline void ar_design(const std::vector<double>& x, int q, long t0, Eigen::MatrixXd& X,
                      Eigen::VectorXd& y) {
    const long T = static_cast<long>(x.size());
    const long rows = T - t0;
    X.resize(rows, q + 1);
    y.resize(rows);
    for (long t = t0; t < T; ++t) {
        const long r = t - t0;
        X(r, 0) = 1.0;
        for (int j = 1; j <= q; ++j) X(r, j) = x[t - j];
        y(r) = x[t];
    }
}

}  // namespace detail

/// Least-squares AR(q) with intercept on rows t = q+1..T. HAC covariance is
/// attached with the automatic Bartlett bandwidth.
inline ArFit fit_ar_ols(const ReturnSeries& returns, int q, int bandwidth = -1) {
    const long T = static_cast<long>(returns.size());
    if (q < 1) throw std::invalid_argument("fit_ar_ols: order must be >= 1");
    if (T <= q + 2) throw std::invalid_argument("fit_ar_ols: insufficient data");
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    detail::ar_design(returns.values, q, q, X, y);
    auto base = ols(X, y);
    ArFit fit;
    fit.q = q;
    fit.alpha = base.coef;
    fit.residuals = base.residuals;
    fit.n_used = base.n;
    fit.regressors = std::move(X);
    fit.xtx_inv = base.xtx_inv;
    const double ybar = y.mean();
    const double tss = (y.array() - ybar).square().sum();
    fit.adj_r2 = 1.0 - (base.rss / static_cast<double>(base.n - base.k)) /
                           (tss / static_cast<double>(base.n - 1));
    const double n = static_cast<double>(base.n);
    fit.sbic = std::log(base.rss / n) + (q + 1) * std::log(n) / n;
    fit.nw_bandwidth = bandwidth >= 0 ? bandwidth : nw_auto_bandwidth(base.n);
    fit.hac_cov = newey_west_cov(fit.regressors, fit.residuals, fit.xtx_inv, fit.nw_bandwidth);
    return fit;
}

/// Newey-West covariance of an existing fit at a given bandwidth
/// (negative = the fit's stored automatic bandwidth).
inline Eigen::MatrixXd newey_west(const ArFit& fit, int bandwidth = -1) {
    return newey_west_cov(fit.regressors, fit.residuals, fit.xtx_inv,
                          bandwidth >= 0 ? bandwidth : fit.nw_bandwidth);
}

/// Schwarz criterion ln(RSS/n) + (q+1) ln(n)/n evaluated for q = 1..q_max on
/// the common sample t = q_max+1..T; ties break toward the smaller order.
inline int select_order_sbic(const ReturnSeries& returns, int q_max,
                             std::vector<double>* out_values = nullptr) {
    const long T = static_cast<long>(returns.size());
    if (q_max < 1) throw std::invalid_argument("select_order_sbic: q_max must be >= 1");
    if (T <= q_max + 2) throw std::invalid_argument("select_order_sbic: insufficient data");
    if (out_values) out_values->clear();
    int best = 1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= q_max; ++q) {
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        detail::ar_design(returns.values, q, q_max, X, y);
        auto base = ols(X, y);
        const double n = static_cast<double>(base.n);
        const double val = std::log(base.rss / n) + (q + 1) * std::log(n) / n;
        if (out_values) out_values->push_back(val);
        if (val < best_val) {
            best_val = val;
            best = q;
        }
    }
    return best;
}

/// Hansen joint constancy statistic L_C for all q+2 parameters, published 1%
/// critical values. m indexes the parameter count.
inline double hansen_critical_1pct(int m) {
    static const double table[] = {0.748, 1.07, 1.35, 1.60, 1.88, 2.12, 2.35,
                                   2.59,  2.82, 3.05, 3.27, 3.51, 3.69, 3.90,
                                   4.12,  4.33, 4.54, 4.75, 4.95, 5.16};
    if (m < 1 || m > 20)
        throw std::invalid_argument("hansen_critical_1pct: parameter count out of table range");
    return table[m - 1];
}

/// Hansen (1992) L_C over the regression coefficients and the error
/// variance: scores f_t = (x_t e_t, e_t^2 - sigma2), V = sum f_t f_t',
/// L_C = (1/n) sum_t S_t' V^{-1} S_t with S_t the cumulative score sums.
/// A numerically zero score matrix (exact fit) yields statistic 0.
inline LcResult hansen_constancy_test(const ArFit& fit) {
    const long n = fit.n_used;
    const long k = fit.alpha.size();
    const int m = static_cast<int>(k) + 1;
    Eigen::MatrixXd f(n, m);
    const double sigma2 = fit.residuals.squaredNorm() / static_cast<double>(n);
    for (long t = 0; t < n; ++t) {
        f.block(t, 0, 1, k) = fit.regressors.row(t) * fit.residuals(t);
        f(t, k) = fit.residuals(t) * fit.residuals(t) - sigma2;
    }
    LcResult out;
    out.n_params = m;
    out.critical_1pct = hansen_critical_1pct(m);
    const double fscale = f.norm();
    if (fscale < 1e-12 * std::max(1.0, fit.regressors.norm())) {
        out.statistic = 0.0;  // degenerate exact fit: scores identically zero
        out.reject_1pct = false;
        return out;
    }
    Eigen::MatrixXd V = f.transpose() * f;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        (ldlt.vectorD().array() < 1e-14 * V.norm()).any())
        throw std::runtime_error("hansen_constancy_test: singular score covariance");
    Eigen::MatrixXd S(n, m);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m);
    for (long t = 0; t < n; ++t) {
        acc += f.row(t);
        S.row(t) = acc;
    }
    Eigen::MatrixXd VinvSt = ldlt.solve(S.transpose());
    double lc = 0.0;
    for (long t = 0; t < n; ++t) lc += S.row(t).dot(VinvSt.col(t));
    out.statistic = lc / static_cast<double>(n);
    out.reject_1pct = out.statistic > out.critical_1pct;
    return out;
}

/// Sum of the slope coefficients (intercept excluded).
inline double cumulative_ar_sum(const ArFit& fit) {
    return fit.alpha.size() > 1 ? fit.alpha.tail(fit.alpha.size() - 1).sum() : 0.0;
}

}  // namespace mkteff
