#ifndef DURFIT_DESIGN_HPP
#define DURFIT_DESIGN_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "durfit/scenarios.hpp"

namespace durfit {

// Arm layout plus patient allocation. Arms are strictly ascending durations
// spanning [10,20]; allocation counts sum to the requested total N.
struct TrialDesign {
    std::vector<double> arms;
    std::vector<int> allocation;
    std::string label;

    int total_n() const {
        int n = 0;
        for (int a : allocation) n += a;
        return n;
    }
};

// k equidistant arms across [d_min, d_max], exact reals, no rounding.
inline std::vector<double> equidistant_arms(int k, double d_min, double d_max) {
    if (k < 2) throw std::domain_error("equidistant_arms: need at least 2 arms");
    if (!(d_min < d_max)) throw std::domain_error("equidistant_arms: d_min must be < d_max");
    std::vector<double> arms(k);
    for (int i = 0; i < k; ++i)
        arms[i] = d_min + static_cast<double>(i) * (d_max - d_min) / (k - 1);
    return arms;
}

// The preset non-equidistant layout with arms concentrated in the first half
// of the duration range.
inline std::vector<double> ned_arms() {
    return {10.0, 11.0, 13.0, 15.0, 20.0};
}

// As-equal-as-possible split of total_n across the arms; the remainder goes
// one extra patient each to the shortest-duration arms.
inline std::vector<int> allocate(int total_n, std::span<const double> arms) {
    const int k = static_cast<int>(arms.size());
    if (k < 1 || total_n < k)
        throw std::domain_error("allocate: total_n must be >= number of arms");
    const int base = total_n / k;
    const int remainder = total_n % k;
    std::vector<int> counts(k, base);
    for (int i = 0; i < remainder; ++i) counts[i] += 1;
    return counts;
}

// Resolves a design label ("ED{k}" or "NED5") and total sample size into a
// full TrialDesign.
inline TrialDesign make_design(const std::string& label, int total_n) {
    std::vector<double> arms;
    if (label == "NED5") {
        arms = ned_arms();
    } else if (label.size() > 2 && label.rfind("ED", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(label.substr(2));
        } catch (const std::exception&) {
            throw std::domain_error("unknown design label: " + label);
        }
        arms = equidistant_arms(k, kDurationMin, kDurationMax);
    } else {
        throw std::domain_error("unknown design label: " + label);
    }
    return TrialDesign{arms, allocate(total_n, arms), label};
}

inline TrialDesign make_design(std::vector<double> arms, int total_n, std::string label) {
    for (std::size_t i = 1; i < arms.size(); ++i)
        if (!(arms[i - 1] < arms[i]))
            throw std::domain_error("custom arms must be strictly ascending");
    auto counts = allocate(total_n, arms);
    return TrialDesign{std::move(arms), std::move(counts), std::move(label)};
}

}  // namespace durfit

#endif
