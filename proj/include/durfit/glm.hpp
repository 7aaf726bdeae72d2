#ifndef DURFIT_GLM_HPP
#define DURFIT_GLM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace durfit {

// Weighted binomial regression problem. One row per trial arm: X holds the
// basis expansion (first column all ones), trials the per-arm n_i, successes
// the per-arm cure counts.
struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd trials;
    Eigen::VectorXd successes;
};

struct GlmFit {
    Eigen::VectorXd coefficients;  // on the original column scale
    double deviance = 0.0;
    bool converged = false;
    bool ridged = false;
    int iterations = 0;
};

namespace detail {

inline double xlogy(double x, double y) {
    return x > 0.0 ? x * std::log(y) : 0.0;
}

// Binomial deviance against the saturated model.
inline double binomial_deviance(const Eigen::VectorXd& successes, const Eigen::VectorXd& trials,
                                const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < trials.size(); ++i) {
        const double y = successes[i];
        const double n = trials[i];
        dev += xlogy(y, y / (n * mu[i])) + xlogy(n - y, (n - y) / (n * (1.0 - mu[i])));
    }
    return 2.0 * dev;
}

inline double clamp_eta(double eta) {
    return eta < -30.0 ? -30.0 : (eta > 30.0 ? 30.0 : eta);
}

inline double inv_logit(double eta) {
    return 1.0 / (1.0 + std::exp(-eta));
}

}  // namespace detail

// Maximum-likelihood logistic fit by IRLS with internal column
// standardisation. FP basis columns span several orders of magnitude over
// [10,20], so the non-intercept columns are centered and scaled to unit sd
// before the weighted solves, and coefficients are mapped back afterwards.
// The linear predictor is clamped to [-30,30] so quasi-separated data (an
// arm with 0 or 100% cures pulling a coefficient to infinity) still yields a
// usable near-boundary fit. Rank-deficient systems fall back to a small
// ridge penalty on the standardised scale, flagged in the fit.
inline GlmFit fit_logistic(const DesignMatrix& dm) {
    const Eigen::Index nrows = dm.X.rows();
    const Eigen::Index ncols = dm.X.cols();
    if (nrows < 1 || ncols < 1 || dm.trials.size() != nrows || dm.successes.size() != nrows)
        throw std::domain_error("fit_logistic: inconsistent design matrix");
    if (!dm.X.allFinite() || !dm.trials.allFinite() || !dm.successes.allFinite())
        throw std::domain_error("fit_logistic: non-finite entries in design matrix");

    // Standardise non-intercept columns.
    Eigen::VectorXd center = Eigen::VectorXd::Zero(ncols);
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(ncols);
    Eigen::MatrixXd Xs = dm.X;
    for (Eigen::Index j = 1; j < ncols; ++j) {
        const double mean = dm.X.col(j).mean();
        double var = (dm.X.col(j).array() - mean).square().sum() / std::max<Eigen::Index>(nrows - 1, 1);
        const double sd = std::sqrt(var);
        center[j] = mean;
        scale[j] = sd > 1e-12 ? sd : 1.0;
        Xs.col(j) = (dm.X.col(j).array() - center[j]) / scale[j];
    }

    GlmFit fit;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(ncols);
    Eigen::VectorXd mu(nrows);
    // Initial fitted values shrunk away from 0/1.
    for (Eigen::Index i = 0; i < nrows; ++i)
        mu[i] = (dm.successes[i] + 0.5) / (dm.trials[i] + 1.0);
    double deviance = detail::binomial_deviance(dm.successes, dm.trials, mu);

    constexpr int kMaxIter = 50;
    constexpr double kDevTol = 1e-8;
    constexpr double kRidge = 1e-6;

    Eigen::VectorXd eta(nrows);
    for (Eigen::Index i = 0; i < nrows; ++i)
        eta[i] = std::log(mu[i] / (1.0 - mu[i]));

    for (int iter = 0; iter < kMaxIter; ++iter) {
        // Working response and weights at the current mu.
        Eigen::VectorXd w(nrows), z(nrows);
        for (Eigen::Index i = 0; i < nrows; ++i) {
            const double v = mu[i] * (1.0 - mu[i]);
            w[i] = dm.trials[i] * v;
            z[i] = eta[i] + (dm.successes[i] - dm.trials[i] * mu[i]) / (dm.trials[i] * v);
        }
        Eigen::VectorXd sw = w.array().sqrt();
        Eigen::MatrixXd A = sw.asDiagonal() * Xs;
        Eigen::VectorXd b = sw.asDiagonal() * z;

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        qr.setThreshold(1e-10);
        Eigen::VectorXd beta_new;
        if (qr.rank() < ncols) {
            // Ridge on the standardised scale.
            Eigen::MatrixXd AtA = A.transpose() * A;
            AtA.diagonal().array() += kRidge;
            beta_new = AtA.ldlt().solve(A.transpose() * b);
            fit.ridged = true;
        } else {
            beta_new = qr.solve(b);
        }

        // Step-halving when deviance increases.
        double dev_new = 0.0;
        Eigen::VectorXd beta_try = beta_new;
        for (int halving = 0;; ++halving) {
            Eigen::VectorXd eta_try = Xs * beta_try;
            for (Eigen::Index i = 0; i < nrows; ++i) eta_try[i] = detail::clamp_eta(eta_try[i]);
            Eigen::VectorXd mu_try = eta_try.unaryExpr([](double e) { return detail::inv_logit(e); });
            dev_new = detail::binomial_deviance(dm.successes, dm.trials, mu_try);
            if (dev_new <= deviance + kDevTol || halving >= 10) {
                eta = eta_try;
                mu = mu_try;
                break;
            }
            beta_try = 0.5 * (beta_try + beta);
        }
        beta = beta_try;
        fit.iterations = iter + 1;
        if (std::abs(deviance - dev_new) < kDevTol) {
            deviance = dev_new;
            fit.converged = true;
            break;
        }
        deviance = dev_new;
    }

    fit.deviance = deviance;

    // Map coefficients back to the original column scale.
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(ncols);
    coef[0] = beta[0];
    for (Eigen::Index j = 1; j < ncols; ++j) {
        coef[j] = beta[j] / scale[j];
        coef[0] -= beta[j] * center[j] / scale[j];
    }
    fit.coefficients = coef;
    return fit;
}

// Inverse-logit of the fitted linear predictor; strictly inside (0,1).
inline double predict_probability(const GlmFit& fit, const Eigen::VectorXd& basis_row) {
    if (basis_row.size() != fit.coefficients.size())
        throw std::domain_error("predict_probability: basis row length mismatch");
    return detail::inv_logit(fit.coefficients.dot(basis_row));
}

}  // namespace durfit

#endif
