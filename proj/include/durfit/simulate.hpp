#ifndef DURFIT_SIMULATE_HPP
#define DURFIT_SIMULATE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "durfit/design.hpp"
#include "durfit/scenarios.hpp"

namespace durfit {

// One simulated trial in aggregated form: per-arm (duration, n, cures).
struct TrialData {
    struct Row {
        double duration;
        int n;
        int cures;
    };
    std::vector<Row> rows;
};

// Deterministic counter-based stream: the state is seeded by mixing the
// (master_seed, scenario, design, sim_index) tuple, so replicates are
// independent of execution order and thread scheduling. Draws use an
// xoshiro-style output chain built from splitmix64 steps, which keeps the
// sequence identical across standard libraries and platforms.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    std::uint64_t z = h;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_string(std::string_view s) {
    // FNV-1a
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

// Derives an independent stream for one simulation replicate. Changing any
// input changes the stream.
inline RngStream derive_stream(std::uint64_t master_seed, int scenario_id,
                               std::string_view design_label, std::uint64_t sim_index) {
    std::uint64_t h = detail::mix64(master_seed, 0x5DEECE66DULL);
    h = detail::mix64(h, static_cast<std::uint64_t>(scenario_id));
    h = detail::mix64(h, detail::hash_string(design_label));
    h = detail::mix64(h, sim_index);
    return RngStream(h);
}

// Exact binomial draw by Bernoulli summation; arm sizes here are small
// (tens to a few hundred), so this is both exact and cheap.
inline int binomial_draw(RngStream& stream, int n, double p) {
    int successes = 0;
    for (int i = 0; i < n; ++i)
        if (stream.next_uniform() < p) ++successes;
    return successes;
}

// Draws per-arm cure counts from Binomial(n_i, f(D_i)), consuming the stream
// arm-by-arm in ascending duration order.
inline TrialData simulate_trial(const TrialDesign& design, const ScenarioCurve& scenario,
                                RngStream& stream) {
    if (design.arms.size() != design.allocation.size() || design.arms.size() < 2)
        throw std::domain_error("simulate_trial: invalid design");
    TrialData data;
    data.rows.reserve(design.arms.size());
    for (std::size_t i = 0; i < design.arms.size(); ++i) {
        const double p = true_probability(scenario.id, design.arms[i]);
        const int n = design.allocation[i];
        data.rows.push_back({design.arms[i], n, binomial_draw(stream, n, p)});
    }
    return data;
}

}  // namespace durfit

#endif
