#include "uavinsar/experiments.hpp"
#include "uavinsar/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

uavinsar::ScenarioConfig load_with_overrides(const std::string& path) {
    uavinsar::ScenarioConfig cfg;
    if (!path.empty()) cfg = uavinsar::load_scenario(path);
    const auto applied = uavinsar::apply_env_overrides(cfg);
    for (const auto& key : applied)
        std::cerr << "scenario override from environment: " << key << "\n";
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mission planning campaigns for two-UAV bistatic InSAR coverage"};
    app.require_subcommand(1);

    // --- run ----------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run one figure campaign and emit CSV files");
    std::string figure = "convergence";
    std::string scenario_path;
    std::string out_dir = ".";
    std::string psi_arg = "auto";
    std::string benchmark_arg = "none";
    int realizations = 0;
    std::uint64_t seed = 1;
    std::vector<double> grid;
    bool paper_scale = false;
    run->add_option("--figure", figure,
                    "convergence | step_size | baseline_vs_pcom | coverage_vs_snr_min | "
                    "velocity_vs_pcom")
        ->required();
    run->add_option("--scenario", scenario_path, "scenario file (key = value [unit]); defaults otherwise");
    run->add_option("--realizations", realizations, "realizations per cell (0 = scale default)");
    run->add_option("--seed", seed, "base seed for all realization streams");
    run->add_option("--psi", psi_arg, "AO step size in [0,1], or 'auto' for exhaustive search");
    run->add_option("--benchmark", benchmark_arg, "restrict to one scheme: 1 | 2 | 3 | none");
    run->add_option("--out", out_dir, "output directory for CSV files");
    run->add_option("--grid", grid, "override of the swept grid values");
    run->add_flag("--paper-scale", paper_scale,
                  "full-scale campaign (Table population, iteration, and realization counts)");

    // --- summarize ------------------------------------------------------------
    auto* sum = app.add_subcommand("summarize", "Aggregate campaign CSVs into a gain table");
    std::string sum_dir = ".";
    sum->add_option("dir", sum_dir, "directory holding convergence_raw.csv")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            uavinsar::ExperimentSpec spec;
            const auto fig = uavinsar::figure_from_name(figure);
            if (!fig) {
                std::cerr << "error: code=bad_figure msg=unknown figure '" << figure << "'\n";
                return 2;
            }
            spec.figure = *fig;
            spec.out_dir = out_dir;
            spec.realizations = realizations;
            spec.base_seed = seed;
            spec.grid = grid;
            spec.paper_scale = paper_scale;
            if (psi_arg != "auto") spec.psi = std::stod(psi_arg);
            if (benchmark_arg != "none") {
                const int b = std::stoi(benchmark_arg);
                if (b < 1 || b > 3) {
                    std::cerr << "error: code=bad_benchmark msg=benchmark must be 1, 2, 3 or none\n";
                    return 2;
                }
                spec.benchmark = b;
            }
            const auto cfg = load_with_overrides(scenario_path);
            const auto status = uavinsar::run_experiment(spec, cfg);
            if (status.exit_code != 0)
                std::cerr << "error: code=" << status.error << "\n";
            return status.exit_code;
        }
        const auto status = uavinsar::summarize(sum_dir, std::cout);
        if (status.exit_code != 0) std::cerr << "error: code=" << status.error << "\n";
        return status.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: code=exception msg=" << e.what() << "\n";
        return 1;
    }
}
