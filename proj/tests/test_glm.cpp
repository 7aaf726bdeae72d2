#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "durfit/glm.hpp"

using namespace durfit;

namespace {

DesignMatrix intercept_only(int arms, int n_per_arm, const std::vector<int>& cures) {
    DesignMatrix dm;
    dm.X = Eigen::MatrixXd::Ones(arms, 1);
    dm.trials = Eigen::VectorXd::Constant(arms, n_per_arm);
    dm.successes.resize(arms);
    for (int i = 0; i < arms; ++i) dm.successes[i] = cures[static_cast<std::size_t>(i)];
    return dm;
}

double loglik(const DesignMatrix& dm, const Eigen::VectorXd& beta) {
    double ll = 0.0;
    Eigen::VectorXd eta = dm.X * beta;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        ll += dm.successes[i] * eta[i] - dm.trials[i] * std::log1p(std::exp(eta[i]));
    return ll;
}

// Independent oracle: dense grid search over (b0, b1), coarse pass to locate
// the optimum, then step 1e-3 around it.
Eigen::VectorXd grid_search_mle(const DesignMatrix& dm) {
    double best0 = 0, best1 = 0, best = -1e300;
    for (double b0 = -5.0; b0 <= 5.0; b0 += 0.05) {
        for (double b1 = -5.0; b1 <= 5.0; b1 += 0.05) {
            Eigen::Vector2d beta(b0, b1);
            const double ll = loglik(dm, beta);
            if (ll > best) {
                best = ll;
                best0 = b0;
                best1 = b1;
            }
        }
    }
    const double c0 = best0, c1 = best1;
    for (double b0 = c0 - 0.06; b0 <= c0 + 0.06; b0 += 0.001) {
        for (double b1 = c1 - 0.06; b1 <= c1 + 0.06; b1 += 0.001) {
            Eigen::Vector2d beta(b0, b1);
            const double ll = loglik(dm, beta);
            if (ll > best) {
                best = ll;
                best0 = b0;
                best1 = b1;
            }
        }
    }
    return Eigen::Vector2d(best0, best1);
}

}  // namespace

TEST_CASE("intercept-only MLE is logit of the pooled proportion") {
    // 7 arms of 72, 378 total cures -> proportion 0.75, beta0 = ln 3
    auto dm = intercept_only(7, 72, {54, 54, 54, 54, 54, 54, 54});
    auto fit = fit_logistic(dm);
    CHECK(fit.converged);
    CHECK(fit.coefficients[0] == doctest::Approx(std::log(3.0)).epsilon(1e-8));

    // deviance equals the null-model deviance computed directly
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(7, 0.75);
    const double null_dev = detail::binomial_deviance(dm.successes, dm.trials, mu);
    CHECK(fit.deviance == doctest::Approx(null_dev).epsilon(1e-8));
}

TEST_CASE("saturated model has zero deviance") {
    DesignMatrix dm;
    dm.X.resize(3, 3);
    dm.X << 1, 10, 100, 1, 15, 225, 1, 20, 400;
    dm.trials = Eigen::Vector3d(50, 50, 50);
    dm.successes = Eigen::Vector3d(20, 30, 40);
    auto fit = fit_logistic(dm);
    CHECK(fit.deviance == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(fit.deviance >= 0.0);
}

TEST_CASE("IRLS matches the beta-grid oracle on a 3-arm toy problem") {
    DesignMatrix dm;
    dm.X.resize(3, 2);
    dm.X << 1, -1, 1, 0, 1, 1;  // pre-centered covariate keeps the grid window small
    dm.trials = Eigen::Vector3d(40, 40, 40);
    dm.successes = Eigen::Vector3d(22, 26, 32);
    auto fit = fit_logistic(dm);
    CHECK(fit.converged);
    auto oracle = grid_search_mle(dm);
    CHECK(std::abs(fit.coefficients[0] - oracle[0]) < 2e-3);
    CHECK(std::abs(fit.coefficients[1] - oracle[1]) < 2e-3);
}

TEST_CASE("score vector vanishes at the reported optimum") {
    DesignMatrix dm;
    dm.X.resize(5, 3);
    for (int i = 0; i < 5; ++i) {
        const double d = 10.0 + 2.5 * i;
        dm.X(i, 0) = 1.0;
        dm.X(i, 1) = d;
        dm.X(i, 2) = std::log(d);
    }
    dm.trials = Eigen::VectorXd::Constant(5, 100);
    dm.successes.resize(5);
    dm.successes << 55, 65, 72, 80, 84;
    auto fit = fit_logistic(dm);
    REQUIRE(fit.converged);
    Eigen::VectorXd eta = dm.X * fit.coefficients;
    Eigen::VectorXd resid(5);
    for (int i = 0; i < 5; ++i)
        resid[i] = dm.successes[i] - dm.trials[i] / (1.0 + std::exp(-eta[i]));
    Eigen::VectorXd score = dm.X.transpose() * resid;
    const double total_n = dm.trials.sum();
    CHECK(score.cwiseAbs().maxCoeff() < 1e-6 * total_n);
}

TEST_CASE("fitted probabilities are invariant to pre-standardised columns") {
    DesignMatrix raw;
    raw.X.resize(4, 2);
    raw.X << 1, 10, 1, 13, 1, 17, 1, 20;
    raw.trials = Eigen::Vector4d(80, 80, 80, 80);
    raw.successes = Eigen::Vector4d(40, 52, 60, 66);

    DesignMatrix scaled = raw;
    const double mean = raw.X.col(1).mean();
    const double sd = std::sqrt((raw.X.col(1).array() - mean).square().sum() / 3.0);
    scaled.X.col(1) = (raw.X.col(1).array() - mean) / sd;

    auto f1 = fit_logistic(raw);
    auto f2 = fit_logistic(scaled);
    for (int i = 0; i < 4; ++i) {
        const double p1 = predict_probability(f1, raw.X.row(i).transpose());
        const double p2 = predict_probability(f2, scaled.X.row(i).transpose());
        CHECK(std::abs(p1 - p2) < 1e-10);
    }
}

TEST_CASE("deviance is invariant to row reordering") {
    DesignMatrix dm;
    dm.X.resize(4, 2);
    dm.X << 1, 10, 1, 13, 1, 17, 1, 20;
    dm.trials = Eigen::Vector4d(80, 70, 90, 80);
    dm.successes = Eigen::Vector4d(40, 45, 70, 66);
    auto f1 = fit_logistic(dm);

    DesignMatrix perm;
    perm.X.resize(4, 2);
    perm.X << 1, 20, 1, 10, 1, 17, 1, 13;
    perm.trials = Eigen::Vector4d(80, 80, 90, 70);
    perm.successes = Eigen::Vector4d(66, 40, 70, 45);
    auto f2 = fit_logistic(perm);
    CHECK(f1.deviance == doctest::Approx(f2.deviance).epsilon(1e-10));
}

TEST_CASE("predict_probability") {
    GlmFit fit;
    fit.coefficients = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd row(2);
    row << 1.0, 7.0;
    CHECK(predict_probability(fit, row) == doctest::Approx(0.5).epsilon(1e-15));

    GlmFit fit1;
    fit1.coefficients = Eigen::VectorXd::Constant(1, std::log(3.0));
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    CHECK(predict_probability(fit1, one) == doctest::Approx(0.75).epsilon(1e-12));

    GlmFit fit30;
    fit30.coefficients = Eigen::VectorXd::Constant(1, 30.0);
    const double p = predict_probability(fit30, one);
    CHECK(p < 1.0);
    CHECK(std::isfinite(p));

    Eigen::VectorXd wrong = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(predict_probability(fit, wrong), std::domain_error);
}

TEST_CASE("non-finite design entries are rejected; separation survives") {
    DesignMatrix dm;
    dm.X.resize(3, 2);
    dm.X << 1, 10, 1, 15, 1, std::numeric_limits<double>::quiet_NaN();
    dm.trials = Eigen::Vector3d(10, 10, 10);
    dm.successes = Eigen::Vector3d(5, 5, 5);
    CHECK_THROWS_AS(fit_logistic(dm), std::domain_error);

    // fully separated arms: clamp keeps the fit finite and usable
    DesignMatrix sep;
    sep.X.resize(3, 2);
    sep.X << 1, 10, 1, 15, 1, 20;
    sep.trials = Eigen::Vector3d(30, 30, 30);
    sep.successes = Eigen::Vector3d(0, 30, 30);
    auto fit = fit_logistic(sep);
    CHECK(fit.coefficients.allFinite());
    Eigen::VectorXd row(2);
    row << 1.0, 15.0;
    const double p = predict_probability(fit, row);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("rank-deficient design falls back to ridge and is flagged") {
    DesignMatrix dm;
    dm.X.resize(3, 3);
    dm.X << 1, 10, 20, 1, 15, 30, 1, 20, 40;  // third column = 2 * second
    dm.trials = Eigen::Vector3d(50, 50, 50);
    dm.successes = Eigen::Vector3d(25, 30, 35);
    auto fit = fit_logistic(dm);
    CHECK(fit.ridged);
    CHECK(fit.coefficients.allFinite());
}
