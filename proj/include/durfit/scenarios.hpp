#ifndef DURFIT_SCENARIOS_HPP
#define DURFIT_SCENARIOS_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace durfit {

inline constexpr double kDurationMin = 10.0;
inline constexpr double kDurationMax = 20.0;
inline constexpr int kNumScenarios = 8;

// One of the eight closed-form data-generating duration-response curves.
// Coefficients are fixed; curves are selected by integer id 1..8.
struct ScenarioCurve {
    int id;
    std::string name;
};

inline ScenarioCurve scenario_curve(int id) {
    static const char* names[kNumScenarios] = {
        "Logistic growth curve",
        "Gompertz curve A",
        "Gompertz curve B",
        "Gompertz curve C",
        "Linear on log-odds scale",
        "Quadratic, curvature>0",
        "Quadratic, curvature<0",
        "Piece-wise linear",
    };
    if (id < 1 || id > kNumScenarios)
        throw std::domain_error("scenario id must be in 1..8, got " + std::to_string(id));
    return ScenarioCurve{id, names[id - 1]};
}

// True probability of cure at the given duration (days), per the scenario's
// closed form. Scenario 5 is specified on the log-odds scale and inverted
// here; scenario 8 picks its segment by duration: [10,12), [12,15), [15,20].
inline double true_probability(int scenario_id, double duration) {
    if (scenario_id < 1 || scenario_id > kNumScenarios)
        throw std::domain_error("scenario id must be in 1..8, got " + std::to_string(scenario_id));
    if (!(duration >= kDurationMin && duration <= kDurationMax))
        throw std::domain_error("duration outside [10,20]: " + std::to_string(duration));
    const double d = duration;
    switch (scenario_id) {
        case 1: return 0.05 + 0.9 / (1.0 + std::exp(-2.0 * d + 25.0));
        case 2: return 0.9 * std::exp(-std::exp(-0.5 * (d - 11.0)));
        case 3: return 0.9 * std::exp(-std::exp(-(d - 11.0)));
        case 4: return 0.9 * std::exp(-2.0 * std::exp(-(d - 9.0)));
        case 5: {
            const double eta = 0.847 + 0.210 * (d - 10.0);
            return 1.0 / (1.0 + std::exp(-eta));
        }
        case 6: return 0.7 + 0.0015 * (d - 10.0) * (d - 10.0);
        case 7: return 0.7 - 0.0015 * (d - 10.0) * (d - 10.0) + 0.03 * (d - 10.0);
        case 8:
            if (d < 12.0) return 0.5 + 0.15 * (d - 10.0);
            if (d < 15.0) return 0.8 + 0.05 * (d - 12.0);
            return 0.94 + 0.01 * (d - 15.0);
    }
    return 0.0;  // unreachable
}

inline double true_probability(const ScenarioCurve& scenario, double duration) {
    return true_probability(scenario.id, duration);
}

inline std::vector<double> true_curve_grid(int scenario_id, std::span<const double> grid) {
    if (grid.empty()) throw std::domain_error("true_curve_grid: empty grid");
    std::vector<double> out;
    out.reserve(grid.size());
    for (double d : grid) out.push_back(true_probability(scenario_id, d));
    return out;
}

}  // namespace durfit

#endif
