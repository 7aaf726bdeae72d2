#ifndef DURFIT_HARNESS_HPP
#define DURFIT_HARNESS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "durfit/design.hpp"
#include "durfit/fitters.hpp"
#include "durfit/metrics.hpp"
#include "durfit/scenarios.hpp"
#include "durfit/simulate.hpp"

namespace durfit {

// One experiment cell: scenario x design x method x N, replicated n_sims
// times from independently derived streams.
struct ExperimentCell {
    int scenario_id = 1;
    std::string design = "ED7";
    int total_n = 504;
    std::string method = "FP";
    int n_sims = 1000;
    std::uint64_t master_seed = 0;
    std::string group;  // preset group label, used to organise output rows
};

struct CellResult {
    ExperimentCell cell;
    std::vector<double> per_sim_sabc;
    SabcSummary summary;
    int converged = 0;
    int ridged = 0;
    // Fitted-probability grids for the first curve_sample replicates, on the
    // same grid as the sABC integration.
    std::vector<std::vector<double>> sampled_curves;
    bool failed = false;
    std::string error;
};

struct RunOptions {
    double step = 0.01;
    int curve_sample = 0;
    int threads = 1;
};

// Runs every replicate of one cell: derive stream -> simulate -> fit ->
// sABC. Replicates are split across threads by index; results land in
// index-addressed slots, so output is identical for any thread count.
inline CellResult run_cell(const ExperimentCell& cell, const RunOptions& opts = {}) {
    if (cell.n_sims < 1) throw std::domain_error("run_cell: n_sims must be >= 1");
    const ScenarioCurve scenario = scenario_curve(cell.scenario_id);
    const TrialDesign design = make_design(cell.design, cell.total_n);

    CellResult result;
    result.cell = cell;
    result.per_sim_sabc.assign(static_cast<std::size_t>(cell.n_sims), 0.0);
    const int k = std::min(opts.curve_sample, cell.n_sims);
    result.sampled_curves.assign(static_cast<std::size_t>(std::max(k, 0)), {});

    std::vector<int> converged(static_cast<std::size_t>(cell.n_sims), 0);
    std::vector<int> ridged(static_cast<std::size_t>(cell.n_sims), 0);
    std::vector<std::string> errors(static_cast<std::size_t>(cell.n_sims));

    auto worker = [&](int begin, int end) {
        for (int sim = begin; sim < end; ++sim) {
            try {
                RngStream stream = derive_stream(cell.master_seed, cell.scenario_id,
                                                 cell.design, static_cast<std::uint64_t>(sim));
                const TrialData data = simulate_trial(design, scenario, stream);
                const FittedCurve fitted = fit_method(cell.method, data);
                const auto truth = [&](double d) { return true_probability(scenario.id, d); };
                const auto pred = [&](double d) { return fitted.predict(d); };
                result.per_sim_sabc[static_cast<std::size_t>(sim)] =
                    sabc(truth, pred, kDurationMin, kDurationMax, opts.step);
                converged[static_cast<std::size_t>(sim)] = fitted.glm_fit.converged ? 1 : 0;
                ridged[static_cast<std::size_t>(sim)] = fitted.glm_fit.ridged ? 1 : 0;
                if (sim < k) {
                    const auto grid = uniform_grid(kDurationMin, kDurationMax, opts.step);
                    auto& curve = result.sampled_curves[static_cast<std::size_t>(sim)];
                    curve.reserve(grid.size());
                    for (double d : grid) curve.push_back(fitted.predict(d));
                }
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(sim)] = e.what();
            }
        }
    };

    const int nthreads = std::max(1, opts.threads);
    if (nthreads == 1 || cell.n_sims < 2 * nthreads) {
        worker(0, cell.n_sims);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (cell.n_sims + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(cell.n_sims, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    for (int sim = 0; sim < cell.n_sims; ++sim) {
        if (!errors[static_cast<std::size_t>(sim)].empty()) {
            result.failed = true;
            result.error = "sim " + std::to_string(sim) + ": " + errors[static_cast<std::size_t>(sim)];
            return result;
        }
        result.converged += converged[static_cast<std::size_t>(sim)];
        result.ridged += ridged[static_cast<std::size_t>(sim)];
    }
    result.summary = summarize(result.per_sim_sabc);
    return result;
}

struct SweepResult {
    std::vector<CellResult> cells;
    // Pooled "Overall" summaries, one per (group, design, method, total_n),
    // concatenating per-sim values across scenarios.
    struct OverallRow {
        std::string group;
        std::string design;
        std::string method;
        int total_n;
        int n_sims;
        SabcSummary summary;
    };
    std::vector<OverallRow> overall;
};

inline SweepResult run_sweep(const std::vector<ExperimentCell>& cells,
                             const RunOptions& opts = {}) {
    if (cells.empty()) throw std::domain_error("run_sweep: empty cell list");
    SweepResult result;
    result.cells.reserve(cells.size());
    for (const auto& cell : cells) result.cells.push_back(run_cell(cell, opts));

    // Pool per-sim values across scenarios within each (group, design,
    // method, N) combination, preserving first-seen order.
    struct Key {
        std::string group, design, method;
        int total_n;
        bool operator==(const Key&) const = default;
    };
    std::vector<Key> keys;
    std::vector<std::vector<double>> pooled;
    for (const auto& cr : result.cells) {
        if (cr.failed) continue;
        Key key{cr.cell.group, cr.cell.design, cr.cell.method, cr.cell.total_n};
        std::size_t idx = keys.size();
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (keys[i] == key) { idx = i; break; }
        if (idx == keys.size()) {
            keys.push_back(key);
            pooled.emplace_back();
        }
        pooled[idx].insert(pooled[idx].end(), cr.per_sim_sabc.begin(), cr.per_sim_sabc.end());
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        result.overall.push_back({keys[i].group, keys[i].design, keys[i].method, keys[i].total_n,
                                  static_cast<int>(pooled[i].size()), summarize(pooled[i])});
    }
    return result;
}

inline const std::vector<int>& sweep_sample_sizes() {
    static const std::vector<int> sizes = {252, 301, 350, 406, 455, 504, 602, 756, 1001};
    return sizes;
}

// The preset cell lists reproducing the published tables and figure data.
//   table2    : 8 scenarios x ED7 x 504 x FP
//   methods   : 8 scenarios x ED7 x 504 x {FP, LS3, LS5, LSNE, MARS}
//   nsweep    : 8 scenarios x ED7 x FP x the sample-size grid
//   arms      : 8 scenarios x {ED3, ED5, ED7, ED9, ED20} x 500 x FP
//   placement : 8 scenarios x {ED7, NED5} x 504 x {FP, LS3, LSNE, MARS}
inline std::vector<ExperimentCell> preset_cells(const std::string& preset, std::uint64_t seed,
                                                int n_sims) {
    std::vector<ExperimentCell> cells;
    auto add = [&](int scenario, const std::string& design, int total_n,
                   const std::string& method, const std::string& group) {
        cells.push_back({scenario, design, total_n, method, n_sims, seed, group});
    };
    if (preset == "table2") {
        for (int s = 1; s <= 8; ++s) add(s, "ED7", 504, "FP", "table2");
    } else if (preset == "methods") {
        for (const std::string& m : {"FP", "LS3", "LS5", "LSNE", "MARS"})
            for (int s = 1; s <= 8; ++s) add(s, "ED7", 504, m, "methods");
    } else if (preset == "nsweep") {
        for (int n : sweep_sample_sizes())
            for (int s = 1; s <= 8; ++s) add(s, "ED7", n, "FP", "nsweep");
    } else if (preset == "arms") {
        for (const std::string& d : {"ED3", "ED5", "ED7", "ED9", "ED20"})
            for (int s = 1; s <= 8; ++s) add(s, d, 500, "FP", "arms");
    } else if (preset == "placement") {
        for (const std::string& m : {"FP", "LS3", "LSNE", "MARS"})
            for (const std::string& d : {"ED7", "NED5"})
                for (int s = 1; s <= 8; ++s) add(s, d, 504, m, "placement");
    } else {
        throw std::domain_error("unknown preset: " + preset +
                                " (known: table2, methods, nsweep, arms, placement)");
    }
    return cells;
}

inline std::vector<ExperimentCell> all_preset_cells(std::uint64_t seed, int n_sims = 1000) {
    std::vector<ExperimentCell> all;
    for (const std::string& p : {"table2", "methods", "nsweep", "arms", "placement"}) {
        auto part = preset_cells(p, seed, n_sims);
        all.insert(all.end(), part.begin(), part.end());
    }
    return all;
}

}  // namespace durfit

#endif
