#pragma once

// Time-varying AR(q) with random-walk coefficients, estimated as one
// penalized least-squares problem:
//
//   data rows      x_t = alpha0 + z_t' beta_t + eps_t,   z_t = (x_{t-1}..x_{t-q})
//   penalty rows   sqrt(lambda) (beta_t - beta_{t-1}) = 0
//
// with no penalty anchoring the first effective period (diffuse start). The
// stacked matrix is banded apart from the single dense intercept column, and
// is factorized by sequential Givens rotations in O(T q^3) without ever
// materializing a dense (qT)^2 matrix. Unknown order: the q coefficients of
// each effective period, time-major, with the intercept as the last column.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mkteff/month.hpp"
#include "mkteff/series.hpp"

namespace mkteff {

struct StackedRow {
    long lead_col = 0;             // first column the row can touch
    std::vector<double> band;      // coefficients of columns lead_col + k
    double tail = 0.0;             // dense intercept-column coefficient
    double rhs = 0.0;
};

struct StackedSystem {
    int q = 0;
    long t_eff = 0;
    double lambda = 1.0;
    long n_unknowns = 0;           // 1 + q * t_eff
    std::vector<StackedRow> rows;  // ordered by lead_col (band discipline)
};

struct TvArFit {
    int q = 0;
    double lambda = 1.0;
    double alpha0 = 0.0;
    std::vector<Month> dates;      // effective periods t = q+1..T
    Eigen::MatrixXd paths;         // t_eff x q, row s = coefficients at period s
    Eigen::VectorXd residuals;     // data-row residuals, length t_eff
};

struct DegreeSeries {
    std::vector<Month> dates;
    std::vector<double> zeta;            // NaN where singular
    std::vector<std::uint8_t> singular_flags;
};

/// Materializes the augmented system. Rows are emitted in band order:
/// the data row of the first effective period, then for each later period
/// its q penalty rows followed by its data row.
inline StackedSystem build_stacked_system(const ReturnSeries& returns, int q, double lambda) {
    const long T = static_cast<long>(returns.size());
    if (q < 1) throw std::invalid_argument("build_stacked_system: order must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("build_stacked_system: lambda must be > 0");
    // solvability bound: data plus penalty rows must cover the unknowns
    if (T < 2 * q + 1) throw std::invalid_argument("build_stacked_system: insufficient data");
    StackedSystem sys;
    sys.q = q;
    sys.t_eff = T - q;
    sys.lambda = lambda;
    sys.n_unknowns = 1 + static_cast<long>(q) * sys.t_eff;
    sys.rows.reserve(static_cast<std::size_t>(sys.t_eff + (sys.t_eff - 1) * q));
    const double w = std::sqrt(lambda);
    const auto& x = returns.values;
    for (long s = 0; s < sys.t_eff; ++s) {
        const long t = s + q;
        if (s > 0) {
            for (int j = 0; j < q; ++j) {
                StackedRow pen;
                pen.lead_col = (s - 1) * q + j;
                pen.band.assign(static_cast<std::size_t>(q) + 1, 0.0);
                pen.band.front() = -w;
                pen.band.back() = w;
                sys.rows.push_back(std::move(pen));
            }
        }
        StackedRow data;
        data.lead_col = s * q;
        data.band.resize(q);
        for (int j = 1; j <= q; ++j) data.band[j - 1] = x[t - j];
        data.tail = 1.0;
        data.rhs = x[t];
        sys.rows.push_back(std::move(data));
    }
    return sys;
}

namespace detail {

/// Sequential banded QR by Givens rotations. R is stored as one band row per
/// beta column (width q+1) plus a dense intercept entry and the rotated rhs.
class BandedGivensQr {
  public:
    BandedGivensQr(long n_beta, int width)
        : nb_(n_beta),
          w_(width),
          rband_(static_cast<std::size_t>(n_beta) * width, 0.0),
          rtail_(n_beta, 0.0),
          rrhs_(n_beta, 0.0),
          installed_(n_beta, 0) {}

    void insert(const StackedRow& row) {
        work_.assign(w_, 0.0);
        for (std::size_t k = 0; k < row.band.size(); ++k) work_[k] = row.band[k];
        double tail = row.tail;
        double rhs = row.rhs;
        long c = row.lead_col;
        while (c < nb_) {
            if (work_[0] != 0.0) {
                double* r = &rband_[static_cast<std::size_t>(c) * w_];
                if (!installed_[c]) {
                    for (int k = 0; k < w_; ++k) r[k] = work_[k];
                    rtail_[c] = tail;
                    rrhs_[c] = rhs;
                    installed_[c] = 1;
                    return;
                }
                rotate(r, rtail_[c], rrhs_[c], work_.data(), tail, rhs);
            }
            // shift the window one column right
            bool any = false;
            for (int k = 1; k < w_; ++k) {
                work_[k - 1] = work_[k];
                any = any || work_[k - 1] != 0.0;
            }
            work_[w_ - 1] = 0.0;
            ++c;
            if (!any) break;
        }
        // beta support exhausted: fold into the intercept pivot
        if (tail != 0.0) {
            if (!last_installed_) {
                rlast_ = tail;
                rlast_rhs_ = rhs;
                last_installed_ = true;
            } else {
                const double r = std::hypot(rlast_, tail);
                const double cs = rlast_ / r;
                const double sn = tail / r;
                const double new_rhs = cs * rlast_rhs_ + sn * rhs;
                rhs = -sn * rlast_rhs_ + cs * rhs;
                rlast_ = r;
                rlast_rhs_ = new_rhs;
            }
        }
        resid_ss_ += rhs * rhs;
    }

    /// Back-substitution; throws on a numerically singular factor.
    void solve(Eigen::VectorXd& beta, double& alpha0) const {
        double scale = std::fabs(rlast_);
        for (long c = 0; c < nb_; ++c)
            scale = std::max(scale, std::fabs(rband_[static_cast<std::size_t>(c) * w_]));
        const double tiny = 1e-13 * std::max(scale, 1.0);
        if (!last_installed_ || std::fabs(rlast_) < tiny)
            throw std::runtime_error("fit_tvar: numerically singular system");
        alpha0 = rlast_rhs_ / rlast_;
        beta.resize(nb_);
        for (long c = nb_ - 1; c >= 0; --c) {
            const double* r = &rband_[static_cast<std::size_t>(c) * w_];
            if (!installed_[c] || std::fabs(r[0]) < tiny)
                throw std::runtime_error("fit_tvar: numerically singular system");
            double s = rrhs_[c] - rtail_[c] * alpha0;
            for (int k = 1; k < w_ && c + k < nb_; ++k) s -= r[k] * beta(c + k);
            beta(c) = s / r[0];
        }
    }

  private:
    void rotate(double* r, double& rt, double& rr, double* v, double& vt, double& vr) {
        const double d = r[0];
        const double a = v[0];
        const double h = std::hypot(d, a);
        const double cs = d / h;
        const double sn = a / h;
        for (int k = 0; k < w_; ++k) {
            const double rk = r[k];
            const double vk = v[k];
            r[k] = cs * rk + sn * vk;
            v[k] = -sn * rk + cs * vk;
        }
        v[0] = 0.0;  // exact by construction
        const double t0 = rt, t1 = vt;
        rt = cs * t0 + sn * t1;
        vt = -sn * t0 + cs * t1;
        const double b0 = rr, b1 = vr;
        rr = cs * b0 + sn * b1;
        vr = -sn * b0 + cs * b1;
    }

    long nb_;
    int w_;
    std::vector<double> rband_;
    std::vector<double> rtail_;
    std::vector<double> rrhs_;
    std::vector<char> installed_;
    std::vector<double> work_;
    double rlast_ = 0.0;
    double rlast_rhs_ = 0.0;
    bool last_installed_ = false;
    double resid_ss_ = 0.0;
};

}  // namespace detail

/// Fits the time-varying AR model by the banded orthogonal factorization.
inline TvArFit fit_tvar(const ReturnSeries& returns, int q, double lambda) {
    StackedSystem sys = build_stacked_system(returns, q, lambda);
    detail::BandedGivensQr qr(sys.n_unknowns - 1, q + 1);
    for (const auto& row : sys.rows) qr.insert(row);
    Eigen::VectorXd beta;
    TvArFit fit;
    fit.q = q;
    fit.lambda = lambda;
    qr.solve(beta, fit.alpha0);
    fit.paths.resize(sys.t_eff, q);
    for (long s = 0; s < sys.t_eff; ++s)
        for (int j = 0; j < q; ++j) fit.paths(s, j) = beta(s * q + j);
    if (!fit.paths.allFinite()) throw std::runtime_error("fit_tvar: non-finite coefficient path");
    const auto& x = returns.values;
    fit.residuals.resize(sys.t_eff);
    for (long s = 0; s < sys.t_eff; ++s) {
        const long t = s + q;
        double pred = fit.alpha0;
        for (int j = 1; j <= q; ++j) pred += fit.paths(s, j - 1) * x[t - j];
        fit.residuals(s) = x[t] - pred;
    }
    fit.dates.assign(returns.dates.begin() + q, returns.dates.end());
    return fit;
}

/// Degree of predictability zeta_t = |sum_j alpha_{j,t} / (1 - sum_j alpha_{j,t})|.
/// Periods where the denominator vanishes (|1 - sum| < tol) are flagged
/// singular and carry NaN instead of an overflow value.
inline DegreeSeries efficiency_degree(const TvArFit& fit, double tol = 1e-8) {
    if (!(tol > 0.0)) throw std::invalid_argument("efficiency_degree: tol must be > 0");
    DegreeSeries out;
    out.dates = fit.dates;
    const long n = fit.paths.rows();
    out.zeta.resize(n);
    out.singular_flags.assign(n, 0);
    for (long s = 0; s < n; ++s) {
        const double sum = fit.paths.row(s).sum();
        const double denom = 1.0 - sum;
        if (std::fabs(denom) < tol) {
            out.zeta[s] = std::numeric_limits<double>::quiet_NaN();
            out.singular_flags[s] = 1;
        } else {
            out.zeta[s] = std::fabs(sum / denom);
        }
    }
    return out;
}

}  // namespace mkteff
