// durfit CLI: runs simulation experiments and writes CSV tables, per-sim
// dumps, fitted-curve grids and optional SVG plots.
//
// Usage:
//   durfit run --experiment table2 --seed 42 --out results/
//   durfit run --experiment custom --config my.cfg --seed 7
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "durfit/config.hpp"
#include "durfit/harness.hpp"
#include "durfit/report.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<durfit::ExperimentCell> build_cells(const durfit::RunConfig& cfg) {
    if (cfg.experiment != "custom")
        return durfit::preset_cells(cfg.experiment, cfg.master_seed, cfg.n_sims);
    std::vector<int> scenarios = cfg.scenarios;
    if (scenarios.empty())
        for (int s = 1; s <= durfit::kNumScenarios; ++s) scenarios.push_back(s);
    std::vector<durfit::ExperimentCell> cells;
    for (int s : scenarios)
        cells.push_back({s, cfg.design, cfg.total_n, cfg.method, cfg.n_sims, cfg.master_seed,
                         "custom"});
    return cells;
}

std::string cell_stem(const durfit::ExperimentCell& cell) {
    return "s" + std::to_string(cell.scenario_id) + "_" + cell.design + "_n" +
           std::to_string(cell.total_n) + "_" + cell.method;
}

int run_command(const durfit::RunConfig& cfg) {
    const auto cells = build_cells(cfg);
    durfit::RunOptions opts;
    opts.step = cfg.step;
    opts.curve_sample = cfg.emit_curves ? cfg.curve_sample : 0;
    opts.threads = cfg.threads;

    std::cerr << "running " << cells.size() << " cells, " << cfg.n_sims
              << " sims each (seed " << cfg.master_seed << ")\n";
    const durfit::SweepResult sweep = durfit::run_sweep(cells, opts);

    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    durfit::emit_summary_csv(sweep, (out / "summary.csv").string());
    durfit::emit_persim_csv(sweep, (out / "per_sim.csv").string());
    if (cfg.emit_curves) {
        for (const auto& cr : sweep.cells) {
            if (cr.failed) continue;
            durfit::emit_curve_dump(cr, cfg.step,
                                    (out / ("curves_" + cell_stem(cr.cell) + ".csv")).string());
        }
    }
    if (cfg.svg) {
        for (const auto& cr : sweep.cells) {
            if (cr.failed || cr.sampled_curves.empty()) continue;
            durfit::detail::write_file((out / ("plot_" + cell_stem(cr.cell) + ".svg")).string(),
                                       durfit::render_cell_svg(cr, cfg.step));
        }
        durfit::detail::write_file((out / "sweep_boxplot.svg").string(),
                                   durfit::render_sweep_svg(sweep));
    }

    // Console report: per-scenario 95th percentiles, flagging unstable cells
    // (the kind of blow-up that inappropriate knot placement produces).
    bool any_failed = false;
    for (const auto& cr : sweep.cells) {
        if (cr.failed) {
            std::cerr << "FAILED cell scenario " << cr.cell.scenario_id << " " << cr.cell.design
                      << " " << cr.cell.method << ": " << cr.error << "\n";
            any_failed = true;
            continue;
        }
        std::printf("scenario %d  %-5s %-4s N=%-5d  p95=%.3f median=%.3f%s\n",
                    cr.cell.scenario_id, cr.cell.design.c_str(), cr.cell.method.c_str(),
                    cr.cell.total_n, cr.summary.p95, cr.summary.median,
                    cr.summary.p95 >= 0.25 ? "  [UNSTABLE: p95 >= 0.25]" : "");
    }
    std::cerr << "wrote " << (out / "summary.csv").string() << "\n";
    return any_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"duration-response trial design simulator"};
    app.require_subcommand(1);

    durfit::RunConfig cfg;
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<std::string> experiment_flag, out_flag, design_flag, method_flag;
    std::optional<int> nsims_flag, total_n_flag, curve_sample_flag, threads_flag;
    std::optional<double> step_flag;
    bool emit_curves_flag = false, svg_flag = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment and write reports");
    run->add_option("--experiment", experiment_flag,
                    "preset: table2|methods|nsweep|arms|placement|custom");
    run->add_option("--seed", seed_flag, "master seed (required, no default)");
    run->add_option("--config", config_path, "flat key=value config file");
    run->add_option("--n-sims", nsims_flag, "simulated trials per cell (default 1000)");
    run->add_option("--out", out_flag, "output directory (default .)");
    run->add_option("--step", step_flag, "integration grid step in days (default 0.01)");
    run->add_option("--curve-sample", curve_sample_flag,
                    "replicate curves per cell in curve dumps (default 100)");
    run->add_option("--threads", threads_flag, "worker threads (default 1)");
    run->add_option("--design", design_flag, "custom experiment: design label");
    run->add_option("--method", method_flag, "custom experiment: method label");
    run->add_option("--total-n", total_n_flag, "custom experiment: total sample size");
    run->add_flag("--emit-curves", emit_curves_flag, "write fitted-curve grid CSVs");
    run->add_flag("--svg", svg_flag, "write static SVG plots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) durfit::apply_config_file(cfg, config_path);
        // Flags override config-file values.
        if (experiment_flag) cfg.experiment = *experiment_flag;
        if (seed_flag) {
            cfg.master_seed = *seed_flag;
            cfg.seed_set = true;
        }
        if (nsims_flag) cfg.n_sims = *nsims_flag;
        if (out_flag) cfg.output_dir = *out_flag;
        if (step_flag) cfg.step = *step_flag;
        if (curve_sample_flag) cfg.curve_sample = *curve_sample_flag;
        if (threads_flag) cfg.threads = *threads_flag;
        if (design_flag) cfg.design = *design_flag;
        if (method_flag) cfg.method = *method_flag;
        if (total_n_flag) cfg.total_n = *total_n_flag;
        if (emit_curves_flag) cfg.emit_curves = true;
        if (svg_flag) cfg.svg = true;

        if (!cfg.seed_set) {
            std::cerr << "error: --seed is required (no silent default)\n"
                      << run->help() << "\n";
            return 2;
        }
        if (cfg.experiment.empty()) {
            std::cerr << "error: --experiment is required "
                      << "(table2|methods|nsweep|arms|placement|custom)\n";
            return 2;
        }
        if (cfg.experiment != "custom") {
            // Validate the preset name up front so typos are a usage error.
            try {
                durfit::preset_cells(cfg.experiment, 0, 1);
            } catch (const std::domain_error& e) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
        }
        return run_command(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
