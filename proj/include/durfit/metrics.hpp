#ifndef DURFIT_METRICS_HPP
#define DURFIT_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace durfit {

// Distributional summary of sABC over simulation replicates.
struct SabcSummary {
    double min = 0.0;
    double p5 = 0.0;
    double median = 0.0;
    double p95 = 0.0;
    double max = 0.0;
    double mean = 0.0;
    int n_sims = 0;
};

// Uniform grid over [d_min, d_max] including both endpoints.
inline std::vector<double> uniform_grid(double d_min, double d_max, double step) {
    if (!(step > 0.0)) throw std::domain_error("uniform_grid: step must be positive");
    if (!(d_min < d_max)) throw std::domain_error("uniform_grid: d_min must be < d_max");
    const double span = d_max - d_min;
    const long long m = std::llround(span / step);
    if (m < 1 || std::abs(d_min + static_cast<double>(m) * step - d_max) > 1e-9)
        throw std::domain_error("uniform_grid: step must divide the range");
    std::vector<double> grid(static_cast<std::size_t>(m) + 1);
    for (long long i = 0; i <= m; ++i) grid[static_cast<std::size_t>(i)] = d_min + static_cast<double>(i) * step;
    grid.back() = d_max;
    return grid;
}

// Scaled area between two curves: trapezoid rule for the integral of
// |f - g| over the grid, divided by the range. Returned as a fraction;
// percentage reporting multiplies by 100 at the output layer.
template <class TrueCurve, class FittedCurveFn>
double sabc(TrueCurve&& truth, FittedCurveFn&& fitted, double d_min, double d_max, double step) {
    const std::vector<double> grid = uniform_grid(d_min, d_max, step);
    double integral = 0.0;
    double prev = std::abs(truth(grid[0]) - fitted(grid[0]));
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = std::abs(truth(grid[i]) - fitted(grid[i]));
        integral += 0.5 * (prev + cur) * (grid[i] - grid[i - 1]);
        prev = cur;
    }
    return integral / (d_max - d_min);
}

enum class Distance { absolute, squared };

// Average pointwise distance over a fixed finite set of durations.
template <class TrueCurve, class FittedCurveFn>
double expected_error(TrueCurve&& truth, FittedCurveFn&& fitted, std::span<const double> durations,
                      Distance distance) {
    if (durations.empty()) throw std::domain_error("expected_error: empty duration list");
    double sum = 0.0;
    for (double d : durations) {
        const double delta = truth(d) - fitted(d);
        sum += distance == Distance::absolute ? std::abs(delta) : delta * delta;
    }
    return sum / static_cast<double>(durations.size());
}

namespace detail {

// Percentile by linear interpolation between order statistics at (1-based)
// index 1 + q*(n-1); input must be sorted.
inline double interpolated_percentile(std::span<const double> sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

inline SabcSummary summarize(std::span<const double> values) {
    if (values.empty()) throw std::domain_error("summarize: empty list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    SabcSummary s;
    s.n_sims = static_cast<int>(sorted.size());
    s.min = sorted.front();
    s.max = sorted.back();
    s.p5 = detail::interpolated_percentile(sorted, 0.05);
    s.median = detail::interpolated_percentile(sorted, 0.50);
    s.p95 = detail::interpolated_percentile(sorted, 0.95);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(sorted.size());
    return s;
}

}  // namespace durfit

#endif
