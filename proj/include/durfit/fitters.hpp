#ifndef DURFIT_FITTERS_HPP
#define DURFIT_FITTERS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "durfit/glm.hpp"
#include "durfit/simulate.hpp"

namespace durfit {

// The fractional-polynomial power set S.
inline constexpr std::array<double, 8> kFpPowers = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};

namespace detail {

inline bool in_power_set(double p) {
    for (double q : kFpPowers)
        if (p == q) return true;
    return false;
}

inline double fp_term(double d, double p) {
    return p == 0.0 ? std::log(d) : std::pow(d, p);
}

}  // namespace detail

// FP basis (1, D^p1, ..., D^pm) with the usual conventions: power 0 means
// ln D, and a repeated power multiplies the previous term by ln D.
inline Eigen::VectorXd fp_basis_row(double duration, std::span<const double> powers) {
    if (!(duration > 0.0)) throw std::domain_error("fp_basis: duration must be positive");
    Eigen::VectorXd row(1 + static_cast<Eigen::Index>(powers.size()));
    row[0] = 1.0;
    for (std::size_t j = 0; j < powers.size(); ++j) {
        if (!detail::in_power_set(powers[j]))
            throw std::domain_error("fp_basis: power outside the FP set");
        if (j > 0 && powers[j] < powers[j - 1])
            throw std::domain_error("fp_basis: powers must be ascending");
        const Eigen::Index col = 1 + static_cast<Eigen::Index>(j);
        row[col] = (j > 0 && powers[j] == powers[j - 1]) ? row[col - 1] * std::log(duration)
                                                         : detail::fp_term(duration, powers[j]);
    }
    return row;
}

// FP2 basis (1, D^p1, D^p2); repeated powers p1 = p2 = p yield
// (1, D^p, D^p ln D).
inline Eigen::VectorXd fp_basis(double duration, double p1, double p2) {
    const std::array<double, 2> powers = {p1, p2};
    return fp_basis_row(duration, powers);
}

// Hinge basis (1, D, (D-K1)+, ..., (D-Km)+) for fixed ascending knots.
inline Eigen::VectorXd spline_basis(double duration, std::span<const double> knots) {
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i - 1] < knots[i])) throw std::domain_error("spline_basis: knots must ascend");
    Eigen::VectorXd row(2 + static_cast<Eigen::Index>(knots.size()));
    row[0] = 1.0;
    row[1] = duration;
    for (std::size_t i = 0; i < knots.size(); ++i)
        row[2 + static_cast<Eigen::Index>(i)] = std::max(0.0, duration - knots[i]);
    return row;
}

inline std::vector<double> ls3_knots() { return {12.5, 15.0, 17.5}; }
inline std::vector<double> lsne_knots() { return {11.0, 13.0, 15.0}; }
// Five equidistant interior knots, the same pattern LS3 follows.
inline std::vector<double> ls5_knots() {
    std::vector<double> k(5);
    for (int i = 0; i < 5; ++i) k[i] = 10.0 + (i + 1) * 10.0 / 6.0;
    return k;
}

// A MARS basis term: sign +1 is max(0, D-K), sign -1 is max(0, K-D).
struct Hinge {
    int sign;
    double knot;

    double operator()(double d) const {
        return sign > 0 ? std::max(0.0, d - knot) : std::max(0.0, knot - d);
    }
};

// Selected FP powers: empty = intercept only, one = FP1, two = FP2.
struct FpBasisSpec {
    std::vector<double> powers;
};
struct SplineBasisSpec {
    std::vector<double> knots;
};
struct MarsBasisSpec {
    std::vector<Hinge> hinges;  // intercept is implicit
};

using BasisSpec = std::variant<FpBasisSpec, SplineBasisSpec, MarsBasisSpec>;

inline Eigen::VectorXd basis_row(const BasisSpec& spec, double duration) {
    if (const auto* fp = std::get_if<FpBasisSpec>(&spec))
        return fp_basis_row(duration, fp->powers);
    if (const auto* ls = std::get_if<SplineBasisSpec>(&spec))
        return spline_basis(duration, ls->knots);
    const auto& mars = std::get<MarsBasisSpec>(spec);
    Eigen::VectorXd row(1 + static_cast<Eigen::Index>(mars.hinges.size()));
    row[0] = 1.0;
    for (std::size_t i = 0; i < mars.hinges.size(); ++i)
        row[1 + static_cast<Eigen::Index>(i)] = mars.hinges[i](duration);
    return row;
}

// A fitted duration-response curve: the basis fully determines the columns,
// so predict() is reproducible from (basis, glm_fit) alone.
struct FittedCurve {
    std::string method;  // FP | LS3 | LS5 | LSNE | MARS
    BasisSpec basis;
    GlmFit glm_fit;

    double predict(double duration) const {
        return predict_probability(glm_fit, basis_row(basis, duration));
    }

    std::string basis_description() const {
        std::ostringstream os;
        if (const auto* fp = std::get_if<FpBasisSpec>(&basis)) {
            os << "powers(";
            for (std::size_t i = 0; i < fp->powers.size(); ++i)
                os << (i ? "," : "") << fp->powers[i];
            os << ")";
        } else if (const auto* ls = std::get_if<SplineBasisSpec>(&basis)) {
            os << "knots(";
            for (std::size_t i = 0; i < ls->knots.size(); ++i)
                os << (i ? "," : "") << ls->knots[i];
            os << ")";
        } else {
            const auto& mars = std::get<MarsBasisSpec>(basis);
            os << "hinges(";
            for (std::size_t i = 0; i < mars.hinges.size(); ++i) {
                const auto& h = mars.hinges[i];
                os << (i ? "," : "") << (h.sign > 0 ? "+" : "-") << h.knot;
            }
            os << ")";
        }
        return os.str();
    }
};

namespace detail {

inline DesignMatrix build_design(const TrialData& data, const BasisSpec& spec) {
    const Eigen::Index nrows = static_cast<Eigen::Index>(data.rows.size());
    if (nrows == 0) throw std::domain_error("empty trial data");
    Eigen::VectorXd first = basis_row(spec, data.rows[0].duration);
    DesignMatrix dm;
    dm.X.resize(nrows, first.size());
    dm.trials.resize(nrows);
    dm.successes.resize(nrows);
    for (Eigen::Index i = 0; i < nrows; ++i) {
        dm.X.row(i) = basis_row(spec, data.rows[i].duration).transpose();
        dm.trials[i] = data.rows[i].n;
        dm.successes[i] = data.rows[i].cures;
    }
    return dm;
}

}  // namespace detail

// Exhaustive FP2 search: all 36 power pairs (28 distinct + 8 repeated) fitted
// on the log-odds scale; minimum deviance wins, ties broken by the
// lexicographically smallest (p1,p2).
inline FittedCurve best_fp2_candidate(const TrialData& data) {
    FittedCurve best;
    double best_dev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < kFpPowers.size(); ++i) {
        for (std::size_t j = i; j < kFpPowers.size(); ++j) {
            FpBasisSpec spec{{kFpPowers[i], kFpPowers[j]}};
            GlmFit fit = fit_logistic(detail::build_design(data, spec));
            if (fit.deviance < best_dev) {
                best_dev = fit.deviance;
                best = FittedCurve{"FP", std::move(spec), std::move(fit)};
            }
        }
    }
    return best;
}

// Fractional-polynomial fit with the degree fixed at 2: the winner of the
// exhaustive 36-pair search is used as-is, no degree-selection test.
inline FittedCurve fit_fp2(const TrialData& data) {
    if (data.rows.size() < 3)
        throw std::domain_error("fit_fp2: need at least 3 arms for 3 parameters");
    return best_fp2_candidate(data);
}

inline FittedCurve fit_linear_spline(const TrialData& data, std::vector<double> knots,
                                     std::string method = "LS") {
    SplineBasisSpec spec{std::move(knots)};
    GlmFit fit = fit_logistic(detail::build_design(data, spec));
    return FittedCurve{std::move(method), std::move(spec), std::move(fit)};
}

namespace detail {

// Weighted least-squares RSS of per-arm cure proportions on the given MARS
// columns; returns infinity when the system is rank-deficient.
inline double mars_wls_rss(const TrialData& data, const std::vector<Hinge>& hinges) {
    const Eigen::Index nrows = static_cast<Eigen::Index>(data.rows.size());
    const Eigen::Index ncols = 1 + static_cast<Eigen::Index>(hinges.size());
    Eigen::MatrixXd A(nrows, ncols);
    Eigen::VectorXd b(nrows);
    for (Eigen::Index i = 0; i < nrows; ++i) {
        const auto& r = data.rows[static_cast<std::size_t>(i)];
        const double sw = std::sqrt(static_cast<double>(r.n));
        A(i, 0) = sw;
        for (std::size_t j = 0; j < hinges.size(); ++j)
            A(i, 1 + static_cast<Eigen::Index>(j)) = sw * hinges[j](r.duration);
        b[i] = sw * (static_cast<double>(r.cures) / r.n);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-9);
    if (qr.rank() < ncols) return std::numeric_limits<double>::infinity();
    return (A * qr.solve(b) - b).squaredNorm();
}

}  // namespace detail

// Greedy forward pass: starting from the intercept, repeatedly add the hinge
// pair {(D-K)+, (K-D)+} over candidate knots K (the observed arm durations)
// that most reduces the weighted RSS of cure proportions. Stops at max_terms,
// when no candidate reduces RSS by at least 1e-10, or when every candidate
// would make the design rank-deficient.
inline std::vector<Hinge> mars_forward(const TrialData& data, int max_terms) {
    if (max_terms < 1 || max_terms % 2 == 0)
        throw std::domain_error("mars_forward: max_terms must be odd and >= 1");
    std::vector<Hinge> hinges;
    std::vector<double> used_knots;
    double rss = detail::mars_wls_rss(data, hinges);
    while (static_cast<int>(hinges.size()) + 1 + 2 <= max_terms) {
        double best_rss = std::numeric_limits<double>::infinity();
        double best_knot = 0.0;
        for (const auto& row : data.rows) {
            const double k = row.duration;
            if (std::find(used_knots.begin(), used_knots.end(), k) != used_knots.end()) continue;
            std::vector<Hinge> trial = hinges;
            trial.push_back({+1, k});
            trial.push_back({-1, k});
            const double r = detail::mars_wls_rss(data, trial);
            if (r < best_rss) {
                best_rss = r;
                best_knot = k;
            }
        }
        if (!(rss - best_rss >= 1e-10)) break;
        hinges.push_back({+1, best_knot});
        hinges.push_back({-1, best_knot});
        used_knots.push_back(best_knot);
        rss = best_rss;
    }
    return hinges;
}

namespace detail {

// GCV with effective parameters C(M) = M + d*(M-1)/2, d = 2, M counting the
// intercept.
inline double mars_gcv(const TrialData& data, const std::vector<Hinge>& hinges) {
    double total_n = 0.0;
    for (const auto& r : data.rows) total_n += r.n;
    const double m = 1.0 + static_cast<double>(hinges.size());
    const double c = m + (m - 1.0);
    const double denom = 1.0 - c / total_n;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    const double rss = mars_wls_rss(data, hinges);
    return (rss / total_n) / (denom * denom);
}

}  // namespace detail

// Backward pass: greedily delete the single hinge whose removal gives the
// lowest GCV; return the visited subset with the global GCV minimum, ties
// keeping the smaller model.
inline std::vector<Hinge> mars_prune(std::vector<Hinge> hinges, const TrialData& data) {
    std::vector<Hinge> best = hinges;
    double best_gcv = detail::mars_gcv(data, hinges);
    std::vector<Hinge> current = std::move(hinges);
    while (!current.empty()) {
        double step_gcv = std::numeric_limits<double>::infinity();
        std::size_t step_idx = 0;
        for (std::size_t i = 0; i < current.size(); ++i) {
            std::vector<Hinge> trial = current;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
            const double g = detail::mars_gcv(data, trial);
            if (g < step_gcv) {
                step_gcv = g;
                step_idx = i;
            }
        }
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(step_idx));
        if (step_gcv <= best_gcv) {
            best_gcv = step_gcv;
            best = current;
        }
    }
    return best;
}

// Full MARS fit: forward + prune on the least-squares scale, then a logistic
// refit of the selected basis so the reported curve is a proper probability.
inline FittedCurve fit_mars(const TrialData& data) {
    const int arms = static_cast<int>(data.rows.size());
    int max_terms = std::min(2 * arms - 1, 11);
    if (max_terms % 2 == 0) --max_terms;
    std::vector<Hinge> hinges = mars_forward(data, max_terms);
    hinges = mars_prune(std::move(hinges), data);
    MarsBasisSpec spec{std::move(hinges)};
    GlmFit fit = fit_logistic(detail::build_design(data, spec));
    return FittedCurve{"MARS", std::move(spec), std::move(fit)};
}

// Dispatch by method label: FP | LS3 | LS5 | LSNE | MARS.
inline FittedCurve fit_method(const std::string& method, const TrialData& data) {
    if (method == "FP") return fit_fp2(data);
    if (method == "LS3") return fit_linear_spline(data, ls3_knots(), "LS3");
    if (method == "LS5") return fit_linear_spline(data, ls5_knots(), "LS5");
    if (method == "LSNE") return fit_linear_spline(data, lsne_knots(), "LSNE");
    if (method == "MARS") return fit_mars(data);
    throw std::domain_error("unknown method label: " + method);
}

}  // namespace durfit

#endif
