#pragma once

// Small dense least squares and Newey-West HAC covariance. These are the
// shared building blocks for the AR baseline and the unit-root regressions.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace mkteff {

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inv;
    double rss = 0.0;
    double s2 = 0.0;  // RSS / (n - k)
    long n = 0;
    long k = 0;
};

/// Least squares via column-pivoted Householder QR. Throws on rank
/// deficiency (e.g. a constant input series duplicating the intercept).
inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw std::invalid_argument("ols: row mismatch");
    if (X.rows() < X.cols()) throw std::invalid_argument("ols: underdetermined system");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw std::runtime_error("ols: rank-deficient regressor matrix");
    OlsFit fit;
    fit.coef = qr.solve(y);
    fit.residuals = y - X * fit.coef;
    fit.rss = fit.residuals.squaredNorm();
    fit.n = X.rows();
    fit.k = X.cols();
    fit.s2 = fit.n > fit.k ? fit.rss / static_cast<double>(fit.n - fit.k) : 0.0;
    // (X'X)^{-1} = P R^{-1} R^{-T} P'
    const auto k = X.cols();
    Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd inv_unperm = Rinv * Rinv.transpose();
    const auto& P = qr.colsPermutation();
    fit.xtx_inv = P * inv_unperm * P.transpose();
    return fit;
}

/// Classic homoskedastic covariance s^2 (X'X)^{-1}.
inline Eigen::MatrixXd ols_cov_classic(const OlsFit& fit) { return fit.s2 * fit.xtx_inv; }

/// Standard automatic Bartlett bandwidth floor(4 (n/100)^{2/9}).
inline int nw_auto_bandwidth(long n) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

/// Newey-West HAC covariance with Bartlett kernel:
///   (X'X)^{-1} [ G_0 + sum_{l=1..L} (1 - l/(L+1)) (G_l + G_l') ] (X'X)^{-1},
/// G_l = sum_t s_t s_{t-l}', s_t = x_t e_t. Bandwidth 0 collapses to the
/// White heteroskedasticity-only estimator. No small-sample adjustment.
inline Eigen::MatrixXd newey_west_cov(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                      const Eigen::MatrixXd& xtx_inv, int bandwidth) {
    if (bandwidth < 0) throw std::invalid_argument("newey_west_cov: negative bandwidth");
    const long n = X.rows();
    const long k = X.cols();
    Eigen::MatrixXd scores(n, k);
    for (long t = 0; t < n; ++t) scores.row(t) = X.row(t) * resid(t);
    Eigen::MatrixXd S = scores.transpose() * scores;  // G_0
    for (int l = 1; l <= bandwidth; ++l) {
        double w = 1.0 - static_cast<double>(l) / (bandwidth + 1.0);
        Eigen::MatrixXd G =
            scores.bottomRows(n - l).transpose() * scores.topRows(n - l);
        S += w * (G + G.transpose());
    }
    return xtx_inv * S * xtx_inv;
}

}  // namespace mkteff
