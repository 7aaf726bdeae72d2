#include <doctest.h>

#include <cmath>
#include <vector>

#include "durfit/fitters.hpp"
#include "durfit/metrics.hpp"

using namespace durfit;

namespace {

// Noise-free data: cures = round(n * f(D)) at the given arms.
TrialData noise_free(int scenario_id, const std::vector<double>& arms, int n_per_arm) {
    TrialData data;
    for (double d : arms) {
        const double p = true_probability(scenario_id, d);
        data.rows.push_back({d, n_per_arm, static_cast<int>(std::lround(n_per_arm * p))});
    }
    return data;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

TEST_CASE("fp_basis conventions") {
    auto b01 = fp_basis(10.0, 0.0, 1.0);
    CHECK(b01[0] == 1.0);
    CHECK(b01[1] == doctest::Approx(std::log(10.0)).epsilon(1e-14));
    CHECK(b01[2] == doctest::Approx(10.0).epsilon(1e-14));

    auto b11 = fp_basis(10.0, 1.0, 1.0);
    CHECK(b11[1] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(b11[2] == doctest::Approx(10.0 * std::log(10.0)).epsilon(1e-14));

    // at D=1 all powers give 1 and all log terms give 0
    CHECK(fp_basis(1.0, -2.0, 3.0)[1] == 1.0);
    CHECK(fp_basis(1.0, -2.0, 3.0)[2] == 1.0);
    CHECK(fp_basis(1.0, 0.0, 0.0)[1] == 0.0);
    CHECK(fp_basis(1.0, 2.0, 2.0)[2] == 0.0);

    CHECK_THROWS_AS(fp_basis(10.0, 0.25, 1.0), std::domain_error);
    CHECK_THROWS_AS(fp_basis(10.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(fp_basis(0.0, 1.0, 2.0), std::domain_error);
}

TEST_CASE("FP2 search enumerates exactly 36 power pairs") {
    int count = 0;
    for (std::size_t i = 0; i < kFpPowers.size(); ++i)
        for (std::size_t j = i; j < kFpPowers.size(); ++j) ++count;
    CHECK(count == 36);
}

TEST_CASE("FP2 recovers scenario 5 from noise-free data") {
    // scenario 5 is itself an FP1 with p=1 on the log-odds scale
    auto data = noise_free(5, equidistant_arms(7, 10, 20), 72);
    auto curve = fit_fp2(data);
    const auto truth = [](double d) { return true_probability(5, d); };
    const auto pred = [&](double d) { return curve.predict(d); };
    CHECK(sabc(truth, pred, 10.0, 20.0, 0.01) < 0.01);
}

TEST_CASE("FP2 inner search is exhaustive and ties break lexicographically") {
    auto data = noise_free(3, equidistant_arms(7, 10, 20), 72);
    auto selected = best_fp2_candidate(data);
    const auto& sel = std::get<FpBasisSpec>(selected.basis).powers;
    REQUIRE(sel.size() == 2);
    for (std::size_t i = 0; i < kFpPowers.size(); ++i) {
        for (std::size_t j = i; j < kFpPowers.size(); ++j) {
            FpBasisSpec spec{{kFpPowers[i], kFpPowers[j]}};
            auto fit = fit_logistic(detail::build_design(data, spec));
            CHECK(selected.glm_fit.deviance <= fit.deviance + 1e-12);
            // anything tied with the winner must not precede it lexicographically
            if (fit.deviance <= selected.glm_fit.deviance + 1e-12)
                CHECK(std::tie(sel[0], sel[1]) <= std::tie(spec.powers[0], spec.powers[1]));
        }
    }
    CHECK_THROWS_AS(fit_fp2(TrialData{{{10.0, 50, 25}, {20.0, 50, 30}}}), std::domain_error);
}

TEST_CASE("FP degree is fixed at two powers") {
    for (int s : {1, 5}) {
        auto data = noise_free(s, equidistant_arms(7, 10, 20), 504);
        auto curve = fit_fp2(data);
        const auto& powers = std::get<FpBasisSpec>(curve.basis).powers;
        REQUIRE(powers.size() == 2);
        CHECK(powers[0] <= powers[1]);
        CHECK(curve.glm_fit.deviance ==
              doctest::Approx(best_fp2_candidate(data).glm_fit.deviance).epsilon(1e-12));
    }
}

TEST_CASE("spline_basis hinge evaluation") {
    std::vector<double> knots = {12.5, 15.0, 17.5};
    auto below = spline_basis(12.0, knots);
    CHECK(below[0] == 1.0);
    CHECK(below[1] == 12.0);
    CHECK(below[2] == 0.0);
    CHECK(below[3] == 0.0);
    CHECK(below[4] == 0.0);

    auto mid = spline_basis(16.0, knots);
    CHECK(mid[2] == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(mid[3] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mid[4] == 0.0);

    CHECK(spline_basis(12.5, knots)[2] == 0.0);
    CHECK_THROWS_AS(spline_basis(14.0, std::vector<double>{15.0, 12.5}), std::domain_error);
}

TEST_CASE("spline knot presets") {
    CHECK(ls3_knots() == std::vector<double>{12.5, 15.0, 17.5});
    CHECK(lsne_knots() == std::vector<double>{11.0, 13.0, 15.0});
    auto k5 = ls5_knots();
    REQUIRE(k5.size() == 5);
    CHECK(k5[0] == doctest::Approx(10.0 + 10.0 / 6.0).epsilon(1e-14));
    CHECK(k5[2] == doctest::Approx(15.0).epsilon(1e-14));
    CHECK(k5[4] == doctest::Approx(10.0 + 50.0 / 6.0).epsilon(1e-14));
    // interior equidistant: constant spacing
    for (std::size_t i = 1; i < k5.size(); ++i)
        CHECK(k5[i] - k5[i - 1] == doctest::Approx(10.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("linear spline fit is piecewise linear on the log-odds scale") {
    auto data = noise_free(8, equidistant_arms(7, 10, 20), 72);
    auto curve = fit_linear_spline(data, ls3_knots(), "LS3");
    // second differences of the log-odds predictor vanish away from knots
    const double h = 0.05;
    for (double d = 10.0 + h; d <= 20.0 - h; d += h) {
        const bool near_knot = std::abs(d - 12.5) <= h + 1e-9 || std::abs(d - 15.0) <= h + 1e-9 ||
                               std::abs(d - 17.5) <= h + 1e-9;
        if (near_knot) continue;
        const double second_diff =
            logit(curve.predict(d - h)) - 2.0 * logit(curve.predict(d)) + logit(curve.predict(d + h));
        CHECK(std::abs(second_diff) < 1e-8);
    }
    // continuity on [10,20]
    double prev = curve.predict(10.0);
    for (double d = 10.0; d <= 20.0 + 1e-9; d += 0.001) {
        const double p = curve.predict(d);
        CHECK(std::abs(p - prev) < 0.01);
        prev = p;
    }
}

TEST_CASE("MARS hinge definition") {
    CHECK(Hinge{+1, 15.0}(12.0) == 0.0);
    CHECK(Hinge{-1, 15.0}(12.0) == 3.0);
    CHECK(Hinge{+1, 15.0}(17.0) == 2.0);
}

TEST_CASE("mars_forward respects the term cap and greedy descent") {
    auto data = noise_free(8, equidistant_arms(7, 10, 20), 72);
    CHECK(mars_forward(data, 1).empty());
    CHECK_THROWS_AS(mars_forward(data, 2), std::domain_error);

    auto hinges = mars_forward(data, 11);
    CHECK(static_cast<int>(hinges.size()) + 1 <= 11);
    // selected knots come from the observed arm durations
    for (const auto& h : hinges) {
        bool found = false;
        for (const auto& r : data.rows)
            if (r.duration == h.knot) found = true;
        CHECK(found);
    }
    // adding terms reduced RSS relative to intercept-only
    CHECK(detail::mars_wls_rss(data, hinges) <= detail::mars_wls_rss(data, {}) + 1e-12);
}

TEST_CASE("MARS GCV effective-parameter formula") {
    TrialData data = noise_free(6, equidistant_arms(7, 10, 20), 72);
    const double total_n = 504.0;
    // intercept only: C(1) = 1
    const double rss0 = detail::mars_wls_rss(data, {});
    const double gcv0 = detail::mars_gcv(data, {});
    CHECK(gcv0 ==
          doctest::Approx((rss0 / total_n) / std::pow(1.0 - 1.0 / total_n, 2)).epsilon(1e-12));
    // M=3 terms: C(3) = 5
    std::vector<Hinge> three = {{+1, 15.0}, {-1, 15.0}};
    const double rss3 = detail::mars_wls_rss(data, three);
    const double gcv3 = detail::mars_gcv(data, three);
    CHECK(gcv3 ==
          doctest::Approx((rss3 / total_n) / std::pow(1.0 - 5.0 / total_n, 2)).epsilon(1e-12));
}

TEST_CASE("mars_prune keeps the GCV-optimal visited subset") {
    auto data = noise_free(8, equidistant_arms(7, 10, 20), 72);
    auto forward = mars_forward(data, 11);
    auto pruned = mars_prune(forward, data);
    CHECK(pruned.size() <= forward.size());
    CHECK(detail::mars_gcv(data, pruned) <= detail::mars_gcv(data, forward) + 1e-15);
    // nothing to prune from an intercept-only model
    CHECK(mars_prune({}, data).empty());
}

TEST_CASE("fit_mars yields a probability curve with intercept") {
    auto data = noise_free(8, equidistant_arms(7, 10, 20), 72);
    auto curve = fit_mars(data);
    CHECK(curve.method == "MARS");
    CHECK(basis_row(curve.basis, 14.0)[0] == 1.0);
    for (double d = 10.0; d <= 20.0 + 1e-9; d += 0.1) {
        const double p = curve.predict(d);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
    // selected knots are a subset of the arm durations
    for (const auto& h : std::get<MarsBasisSpec>(curve.basis).hinges) {
        bool found = false;
        for (const auto& r : data.rows)
            if (r.duration == h.knot) found = true;
        CHECK(found);
    }
}

TEST_CASE("FP log-odds derivative matches finite differences") {
    auto term_deriv = [](double d, double p) {
        return p == 0.0 ? 1.0 / d : p * std::pow(d, p - 1.0);
    };
    for (int scenario : {1, 5}) {
        auto data = noise_free(scenario, equidistant_arms(7, 10, 20), 72);
        auto curve = fit_fp2(data);
        const auto& powers = std::get<FpBasisSpec>(curve.basis).powers;
        const auto& beta = curve.glm_fit.coefficients;
        for (double d : {12.0, 14.0, 16.0, 18.0}) {
            double analytic = 0.0;
            if (powers.size() == 2 && powers[0] == powers[1]) {
                const double p = powers[0];
                const double dp = term_deriv(d, p);
                const double dlog = p == 0.0
                                        ? 2.0 * std::log(d) / d
                                        : std::pow(d, p - 1.0) * (p * std::log(d) + 1.0);
                analytic = beta[1] * dp + beta[2] * dlog;
            } else {
                for (std::size_t j = 0; j < powers.size(); ++j)
                    analytic += beta[1 + static_cast<Eigen::Index>(j)] * term_deriv(d, powers[j]);
            }
            const double h = 1e-5;
            const double fd =
                (logit(curve.predict(d + h)) - logit(curve.predict(d - h))) / (2 * h);
            CHECK(std::abs(fd - analytic) < 1e-4);
        }
    }
}

TEST_CASE("refitting the same data is deterministic") {
    auto data = noise_free(2, equidistant_arms(7, 10, 20), 72);
    for (const std::string& m : {"FP", "LS3", "LS5", "LSNE", "MARS"}) {
        auto a = fit_method(m, data);
        auto b = fit_method(m, data);
        REQUIRE(a.glm_fit.coefficients.size() == b.glm_fit.coefficients.size());
        for (Eigen::Index i = 0; i < a.glm_fit.coefficients.size(); ++i)
            CHECK(a.glm_fit.coefficients[i] == b.glm_fit.coefficients[i]);
        CHECK(a.basis_description() == b.basis_description());
    }
    CHECK_THROWS_AS(fit_method("RCS", data), std::domain_error);
}

TEST_CASE("basis + coefficients reproduce predict") {
    auto data = noise_free(7, equidistant_arms(7, 10, 20), 72);
    for (const std::string& m : {"FP", "LS3", "MARS"}) {
        auto curve = fit_method(m, data);
        for (double d = 10.0; d <= 20.0; d += 0.5) {
            const double via_basis =
                1.0 / (1.0 + std::exp(-curve.glm_fit.coefficients.dot(basis_row(curve.basis, d))));
            CHECK(std::abs(via_basis - curve.predict(d)) < 1e-12);
        }
    }
}
