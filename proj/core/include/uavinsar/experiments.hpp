#pragma once

#include "uavinsar/ao_driver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uavinsar {

enum class FigureId {
    convergence,         // coverage vs AO iteration, all schemes, inits F1/F2
    step_size,           // coverage vs psi
    baseline_vs_pcom,    // optimal b, b_perp vs maximum communication power
    coverage_vs_snr_min, // coverage vs gamma_SNR^min for two power levels
    velocity_vs_pcom,    // mean velocity vs maximum communication power
};

std::optional<FigureId> figure_from_name(const std::string& name);
const char* figure_name(FigureId id);

struct ExperimentSpec {
    FigureId figure = FigureId::convergence;
    std::string out_dir = ".";
    int realizations = 0;        // 0: desk-scale default (20) or Table scale with paper_scale
    std::uint64_t base_seed = 1;
    std::optional<double> psi;   // empty: exhaustive search
    std::optional<int> benchmark; // restrict to one scheme (1..3); empty: figure default
    std::vector<double> grid;    // override of the swept grid; empty: figure default
    bool paper_scale = false;    // restore Table-scale population / iterations / realizations
};

struct ExperimentStatus {
    int exit_code = 0;
    std::string error; // machine-readable cause when exit_code != 0
};

// Runs one figure campaign and writes <figure>_raw.csv and <figure>_agg.csv
// into out_dir. Deterministic for a fixed spec (realization seeds are derived
// from the base seed; schemes and grid points share them).
ExperimentStatus run_experiment(const ExperimentSpec& spec, const ScenarioConfig& cfg);

// Aggregate report over a directory of campaign CSVs: final mean coverage per
// scheme and pairwise gains versus the benchmarks, written to `out` and to
// summary.csv in the directory.
ExperimentStatus summarize(const std::string& dir, std::ostream& out);

// Raw-row schema shared by all figures (fixed order; golden-file tested).
const std::vector<std::string>& raw_csv_columns();
const std::vector<std::string>& agg_csv_columns();

} // namespace uavinsar
