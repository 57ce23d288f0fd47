#pragma once

// ADF-GLS (Elliott-Rothenberg-Stock) unit-root test with Ng-Perron
// modified-information-criterion lag selection.
//
// Pipeline composition: the augmentation lag is selected on the
// OLS-detrended series (Perron-Qu refinement) while the reported statistic
// comes from the regression on the GLS-detrended series. The selection
// criterion itself is exposed separately and runs on whatever detrended
// series it is given.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mkteff/linreg.hpp"
#include "mkteff/series.hpp"

namespace mkteff {

enum class DetrendModel { constant, constant_trend };
enum class LagCriterion { mbic, maic };

/// Series with deterministic components removed. phi_hat holds the
/// coefficients of the detrending regression (intercept, then trend slope
/// when the model includes one).
struct DetrendedSeries {
    std::vector<double> values;
    Eigen::VectorXd phi_hat;
    DetrendModel model = DetrendModel::constant_trend;
    double c_bar = 0.0;
};

struct UnitRootResult {
    double statistic = 0.0;       // t-ratio on the lagged level
    int lag = 0;                  // selected augmentation order
    Eigen::VectorXd phi_hat;      // GLS detrending coefficients
    double rho_hat = 0.0;         // lagged-level coefficient of the ADF regression
    LagCriterion criterion = LagCriterion::mbic;
    DetrendModel model = DetrendModel::constant_trend;
    int p_max = 0;
    double critical_1pct = 0.0;
    bool reject_1pct = false;
};

inline double default_c_bar(DetrendModel model) {
    return model == DetrendModel::constant_trend ? -13.5 : -7.0;
}

/// Schwert-style default maximum augmentation lag floor(12 (T/100)^{1/4}).
inline int default_p_max(std::size_t T) {
    return static_cast<int>(
        std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
}

/// 1%/5%/10% critical values. The trend-model 1% value is the embedded
/// constant -3.42; the remainder come from the ERS asymptotic table.
inline double adf_gls_critical(DetrendModel model, int pct) {
    if (model == DetrendModel::constant_trend) {
        if (pct == 1) return -3.42;
        if (pct == 5) return -2.89;
        if (pct == 10) return -2.57;
    } else {
        if (pct == 1) return -2.58;
        if (pct == 5) return -1.95;
        if (pct == 10) return -1.62;
    }
    throw std::invalid_argument("adf_gls_critical: pct must be 1, 5 or 10");
}

namespace detail {

inline Eigen::MatrixXd deterministic_terms(std::size_t T, DetrendModel model) {
    Eigen::MatrixXd Z(T, model == DetrendModel::constant_trend ? 2 : 1);
    for (std::size_t t = 0; t < T; ++t) {
        Z(t, 0) = 1.0;
        if (model == DetrendModel::constant_trend) Z(t, 1) = static_cast<double>(t + 1);
    }
    return Z;
}

}  // namespace detail

/// Quasi-differences at rho_bar = 1 + c_bar/T (first row untransformed),
/// regresses the quasi-differenced series on equally transformed
/// deterministics, and removes the fitted deterministics from the original.
inline DetrendedSeries gls_detrend(const ReturnSeries& series, DetrendModel model,
                                   double c_bar = std::numeric_limits<double>::quiet_NaN()) {
    const std::size_t T = series.size();
    if (T < 4) throw std::invalid_argument("gls_detrend: insufficient observations");
    if (std::isnan(c_bar)) c_bar = default_c_bar(model);
    const double rho = 1.0 + c_bar / static_cast<double>(T);
    Eigen::MatrixXd Z = detail::deterministic_terms(T, model);
    Eigen::MatrixXd Zq(T, Z.cols());
    Eigen::VectorXd yq(T);
    Zq.row(0) = Z.row(0);
    yq(0) = series.values[0];
    for (std::size_t t = 1; t < T; ++t) {
        Zq.row(t) = Z.row(t) - rho * Z.row(t - 1);
        yq(t) = series.values[t] - rho * series.values[t - 1];
    }
    auto fit = ols(Zq, yq);
    DetrendedSeries out;
    out.model = model;
    out.c_bar = c_bar;
    out.phi_hat = fit.coef;
    out.values.resize(T);
    Eigen::VectorXd fitted = Z * fit.coef;
    for (std::size_t t = 0; t < T; ++t) out.values[t] = series.values[t] - fitted(t);
    return out;
}

/// Plain least-squares detrending on the same deterministics; used for the
/// augmentation-lag selection step.
inline DetrendedSeries ols_detrend(const ReturnSeries& series, DetrendModel model) {
    const std::size_t T = series.size();
    if (T < 4) throw std::invalid_argument("ols_detrend: insufficient observations");
    Eigen::MatrixXd Z = detail::deterministic_terms(T, model);
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(series.values.data(), T);
    auto fit = ols(Z, y);
    DetrendedSeries out;
    out.model = model;
    out.c_bar = 0.0;
    out.phi_hat = fit.coef;
    out.values.resize(T);
    Eigen::VectorXd fitted = Z * fit.coef;
    for (std::size_t t = 0; t < T; ++t) out.values[t] = series.values[t] - fitted(t);
    return out;
}

struct AdfRegression {
    double statistic = 0.0;  // (rho_hat - 1) / se(rho_hat)
    double rho_hat = 0.0;
    int lag = 0;
};

/// Level-form augmented Dickey-Fuller regression without deterministics:
/// y_t = rho y_{t-1} + sum_{j=1..p} gamma_j dy_{t-j}. The series is assumed
/// already detrended.
inline AdfRegression adf_regression(const std::vector<double>& yd, int p) {
    const long T = static_cast<long>(yd.size());
    if (p < 0) throw std::invalid_argument("adf_regression: negative lag");
    const long rows = T - 1 - p;
    if (rows < p + 3) throw std::invalid_argument("adf_regression: insufficient observations");
    Eigen::MatrixXd X(rows, p + 1);
    Eigen::VectorXd y(rows);
    for (long t = p + 1; t < T; ++t) {
        const long r = t - p - 1;
        X(r, 0) = yd[t - 1];
        for (int j = 1; j <= p; ++j) X(r, j) = yd[t - j] - yd[t - j - 1];
        y(r) = yd[t];
    }
    auto fit = ols(X, y);
    AdfRegression out;
    out.lag = p;
    out.rho_hat = fit.coef(0);
    const double se = std::sqrt(fit.s2 * fit.xtx_inv(0, 0));
    out.statistic = (fit.coef(0) - 1.0) / se;
    return out;
}

/// Ng-Perron modified information criterion, evaluated for each candidate
/// lag on the common sample t = p_max+2..T (the largest sample all
/// candidates share):
///   MIC(p) = ln(sigma2_p) + C_T (tau(p) + p) / N_eff,
///   tau(p) = (rho_p - 1)^2 sum y_{t-1}^2 / sigma2_p,
/// with C_T = ln(N_eff) for MBIC and 2 for MAIC. Ties break toward the
/// smaller lag. Returns the argmin; `out_values` (optional) receives the
/// criterion values.
inline int select_lag(const DetrendedSeries& detrended, int p_max, LagCriterion criterion,
                      std::vector<double>* out_values = nullptr) {
    const auto& yd = detrended.values;
    const long T = static_cast<long>(yd.size());
    if (p_max < 0) throw std::invalid_argument("select_lag: negative p_max");
    if (T <= p_max + 2) throw std::invalid_argument("select_lag: insufficient observations");
    const long n_eff = T - p_max - 1;
    if (n_eff < p_max + 3) throw std::invalid_argument("select_lag: insufficient observations");
    double sum_lag_sq = 0.0;
    for (long t = p_max + 1; t < T; ++t) sum_lag_sq += yd[t - 1] * yd[t - 1];

    int best = 0;
    double best_crit = std::numeric_limits<double>::infinity();
    if (out_values) out_values->clear();
    for (int p = 0; p <= p_max; ++p) {
        Eigen::MatrixXd X(n_eff, p + 1);
        Eigen::VectorXd y(n_eff);
        for (long t = p_max + 1; t < T; ++t) {
            const long r = t - p_max - 1;
            X(r, 0) = yd[t - 1];
            for (int j = 1; j <= p; ++j) X(r, j) = yd[t - j] - yd[t - j - 1];
            y(r) = yd[t];
        }
        auto fit = ols(X, y);
        const double sigma2 = fit.rss / static_cast<double>(n_eff);
        const double b0 = fit.coef(0) - 1.0;
        const double tau = b0 * b0 * sum_lag_sq / sigma2;
        const double ct =
            criterion == LagCriterion::mbic ? std::log(static_cast<double>(n_eff)) : 2.0;
        const double crit = std::log(sigma2) + ct * (tau + p) / static_cast<double>(n_eff);
        if (out_values) out_values->push_back(crit);
        if (crit < best_crit) {
            best_crit = crit;
            best = p;
        }
    }
    return best;
}

/// Full ADF-GLS test: GLS-detrend, select the augmentation lag on the
/// OLS-detrended series, run the ADF regression on the GLS-detrended series
/// at that lag, and compare with the embedded 1% critical value.
/// p_max < 0 requests the Schwert default.
inline UnitRootResult adf_gls_test(const ReturnSeries& series, int p_max = -1,
                                   LagCriterion criterion = LagCriterion::mbic,
                                   DetrendModel model = DetrendModel::constant_trend,
                                   double c_bar = std::numeric_limits<double>::quiet_NaN()) {
    const std::size_t T = series.size();
    if (p_max < 0) p_max = default_p_max(T);
    if (T <= static_cast<std::size_t>(p_max) + 2)
        throw std::invalid_argument("adf_gls_test: insufficient observations for p_max " +
                                    std::to_string(p_max));
    DetrendedSeries sel_base = ols_detrend(series, model);
    const int lag = select_lag(sel_base, p_max, criterion);
    DetrendedSeries gls = gls_detrend(series, model, c_bar);
    AdfRegression reg = adf_regression(gls.values, lag);
    UnitRootResult out;
    out.statistic = reg.statistic;
    out.lag = lag;
    out.phi_hat = gls.phi_hat;
    out.rho_hat = reg.rho_hat;
    out.criterion = criterion;
    out.model = model;
    out.p_max = p_max;
    out.critical_1pct = adf_gls_critical(model, 1);
    out.reject_1pct = out.statistic < out.critical_1pct;
    return out;
}

}  // namespace mkteff
