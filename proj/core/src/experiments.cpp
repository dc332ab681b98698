#include "uavinsar/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

namespace uavinsar {

namespace {

const char* kSchemeNames[] = {"proposed", "benchmark1_classical_ao", "benchmark2_fixed_speed",
                              "benchmark3_fixed_look"};

const char* scheme_name(BenchmarkScheme s) { return kSchemeNames[static_cast<int>(s)]; }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("UAVINSAR_THREADS")) hw = std::strtoul(env, nullptr, 10);
    if (hw <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    const unsigned count = std::min<unsigned>(hw, static_cast<unsigned>(n));
    workers.reserve(count);
    for (unsigned w = 0; w < count; ++w)
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : workers) t.join();
}

struct RawRow {
    std::string scheme, variant, param;
    double value = 0.0;
    int realization = 0;
    int iteration = 0;
    double coverage = 0.0, baseline = 0.0, perp_baseline = 0.0, hoa = 0.0, dh90 = 0.0;
    double mean_velocity = 0.0, energy1 = 0.0, energy2 = 0.0;
    std::array<double, 15> margins{};
};

// One experiment cell: a (scheme, variant, grid point) combination whose
// realizations share the common seed set.
struct Cell {
    BenchmarkScheme scheme = BenchmarkScheme::proposed;
    std::string variant;     // init id or secondary sweep level
    std::string param;       // swept key
    double value = 0.0;      // swept value
    ScenarioConfig cfg;      // overridden scenario
    DecisionState init;
    double psi = 1.0;
    bool keep_history = false; // emit one row per AO iteration
};

RawRow make_row(const Cell& cell, int realization, int iteration, const DecisionState& state,
                double coverage, const ScenarioConfig& cfg, const DerivedConstants& dc) {
    RawRow row;
    row.scheme = scheme_name(cell.scheme);
    row.variant = cell.variant;
    row.param = cell.param;
    row.value = cell.value;
    row.realization = realization;
    row.iteration = iteration;
    row.coverage = coverage;
    const MetricAudit a = audit_solution(state, cfg, dc);
    row.baseline = a.baseline;
    row.perp_baseline = a.perp_baseline;
    row.hoa = a.hoa;
    row.dh90 = a.height_error_worst;
    row.mean_velocity = a.mean_velocity;
    row.energy1 = a.energy[0];
    row.energy2 = a.energy[1];
    const ConstraintReport rep = evaluate_constraints(state, cfg, dc);
    for (int c = 0; c < 15; ++c) row.margins[c] = rep.entries[c].margin;
    return row;
}

void write_raw(std::ostream& os, const std::string& figure, const RawRow& r) {
    os << figure << ',' << r.scheme << ',' << r.variant << ',' << r.param << ',' << fmt(r.value)
       << ',' << r.realization << ',' << r.iteration << ',' << fmt(r.coverage) << ','
       << fmt(r.baseline) << ',' << fmt(r.perp_baseline) << ',' << fmt(r.hoa) << ','
       << fmt(r.dh90) << ',' << fmt(r.mean_velocity) << ',' << fmt(r.energy1) << ','
       << fmt(r.energy2);
    for (double m : r.margins) os << ',' << fmt(m);
    os << '\n';
}

struct Moments {
    std::vector<double> values;
    int n = 0;
    void add(double x) {
        ++n;
        values.push_back(x);
    }
    double mean() const {
        if (!n) return 0.0;
        double s = 0.0;
        for (double x : values) s += x;
        return s / n;
    }
    double sigma() const { // population standard deviation: zero for n = 1
        if (n == 0) return 0.0;
        const double m = mean();
        double acc = 0.0;
        for (double x : values) acc += (x - m) * (x - m);
        return std::sqrt(acc / n);
    }
};

} // namespace

const std::vector<std::string>& raw_csv_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {"figure", "scheme", "variant", "param", "value",
                                      "realization", "iteration", "coverage_m2", "baseline_m",
                                      "perp_baseline_m", "hoa_m", "dh90_m", "mean_velocity_mps",
                                      "energy1_J", "energy2_J"};
        for (int i = 1; i <= 15; ++i) c.push_back("margin_c" + std::to_string(i));
        return c;
    }();
    return cols;
}

const std::vector<std::string>& agg_csv_columns() {
    static const std::vector<std::string> cols = {
        "figure", "scheme", "variant", "param", "value", "n",
        "mean_coverage_m2", "sigma_coverage_m2", "mean_velocity_mps", "sigma_velocity_mps",
        "mean_baseline_m", "mean_perp_baseline_m", "mean_hoa_m", "mean_dh90_m"};
    return cols;
}

std::optional<FigureId> figure_from_name(const std::string& name) {
    if (name == "convergence") return FigureId::convergence;
    if (name == "step_size") return FigureId::step_size;
    if (name == "baseline_vs_pcom") return FigureId::baseline_vs_pcom;
    if (name == "coverage_vs_snr_min") return FigureId::coverage_vs_snr_min;
    if (name == "velocity_vs_pcom") return FigureId::velocity_vs_pcom;
    return std::nullopt;
}

const char* figure_name(FigureId id) {
    switch (id) {
    case FigureId::convergence: return "convergence";
    case FigureId::step_size: return "step_size";
    case FigureId::baseline_vs_pcom: return "baseline_vs_pcom";
    case FigureId::coverage_vs_snr_min: return "coverage_vs_snr_min";
    case FigureId::velocity_vs_pcom: return "velocity_vs_pcom";
    }
    return "unknown";
}

ExperimentStatus run_experiment(const ExperimentSpec& spec, const ScenarioConfig& base_cfg) {
    ExperimentStatus status;
    namespace fs = std::filesystem;

    ScenarioConfig cfg = base_cfg;
    AoOptions base_opts = AoOptions::from_config(cfg);
    int realizations = spec.realizations;
    double eps5 = 0.05; // coarse grid at desk scale
    if (spec.paper_scale) {
        if (realizations <= 0) realizations = cfg.realizations;
        eps5 = cfg.eps_psi;
    } else {
        if (realizations <= 0) realizations = 20;
        base_opts.pso.population = std::min(cfg.pso_population, 200);
        base_opts.pso.max_iterations = std::min(cfg.pso_max_iterations, 50);
    }

    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec) return {2, "out_dir_unwritable: " + spec.out_dir};

    // common random numbers: the same per-realization seeds across every cell
    std::vector<std::uint64_t> seeds(realizations);
    for (int r = 0; r < realizations; ++r) seeds[r] = derive_seed(spec.base_seed, 0xE0, r);
    std::vector<std::uint64_t> search_seeds(3);
    for (int i = 0; i < 3; ++i) search_seeds[i] = derive_seed(spec.base_seed, 0x5EED, i);

    auto searched_psi = [&](const ScenarioConfig& c, const DecisionState& init,
                            std::optional<double> pin) -> double {
        if (spec.psi) return *spec.psi;
        const DerivedConstants dc = derive_constants(c);
        AoOptions o = base_opts;
        o.pinned_look_angle = pin;
        return search_psi(c, dc, o, init, eps5, search_seeds).psi;
    };

    // --- assemble the experiment cells ---------------------------------------
    std::vector<Cell> cells;
    const auto add_scheme_cells = [&](const std::vector<BenchmarkScheme>& schemes) {
        const std::pair<const char*, DecisionState> inits[2] = {
            {"F1", initial_state_f1(cfg)}, {"F2", initial_state_f2(cfg)}};
        for (const auto& [init_name, init] : inits) {
            for (BenchmarkScheme sch : schemes) {
                Cell cell;
                cell.scheme = sch;
                cell.variant = init_name;
                cell.param = "iteration";
                cell.cfg = cfg;
                cell.init = init;
                cell.keep_history = true;
                cell.psi = 1.0;
                if (sch == BenchmarkScheme::proposed)
                    cell.psi = searched_psi(cfg, init, std::nullopt);
                else if (sch == BenchmarkScheme::fixed_slave_look_angle)
                    cell.psi = searched_psi(cfg, init, 3.14159265358979323846 / 4.0);
                cells.push_back(std::move(cell));
            }
        }
    };

    switch (spec.figure) {
    case FigureId::convergence: {
        std::vector<BenchmarkScheme> schemes;
        if (spec.benchmark) {
            schemes.push_back(static_cast<BenchmarkScheme>(*spec.benchmark));
        } else {
            schemes = {BenchmarkScheme::proposed, BenchmarkScheme::classical_ao,
                       BenchmarkScheme::fixed_steady_speed,
                       BenchmarkScheme::fixed_slave_look_angle};
        }
        add_scheme_cells(schemes);
        break;
    }
    case FigureId::step_size: {
        std::vector<double> grid = spec.grid;
        if (grid.empty())
            for (double p = 0.0; p <= 1.0 + 1e-9; p += eps5) grid.push_back(std::min(p, 1.0));
        const std::pair<const char*, DecisionState> inits[2] = {
            {"F1", initial_state_f1(cfg)}, {"F2", initial_state_f2(cfg)}};
        for (const auto& [init_name, init] : inits)
            for (double p : grid) {
                Cell cell;
                cell.scheme = BenchmarkScheme::proposed;
                cell.variant = init_name;
                cell.param = "psi";
                cell.value = p;
                cell.cfg = cfg;
                cell.init = init;
                cell.psi = p;
                cells.push_back(std::move(cell));
            }
        break;
    }
    case FigureId::baseline_vs_pcom: {
        std::vector<double> grid = spec.grid; // P_com^max in dB
        if (grid.empty()) grid = {8.0, 8.6, 9.2, 9.8, 10.4, 11.0};
        ScenarioConfig swept = cfg;
        const double beta = std::pow(10.0, 19.3 / 10.0);
        swept.comm_ref_gain = {beta, beta};
        const double psi = searched_psi(swept, initial_state_f1(swept), std::nullopt);
        for (double p_db : grid) {
            Cell cell;
            cell.scheme = BenchmarkScheme::proposed;
            cell.variant = "beta_19.3dB";
            cell.param = "pcom_max_dB";
            cell.value = p_db;
            cell.cfg = swept;
            cell.cfg.comm_power_max = std::pow(10.0, p_db / 10.0);
            cell.init = initial_state_f1(cell.cfg);
            cell.psi = psi;
            cells.push_back(std::move(cell));
        }
        break;
    }
    case FigureId::coverage_vs_snr_min: {
        std::vector<double> grid = spec.grid;
        if (grid.empty()) grid = {0.5, 0.6, 0.7, 0.8, 0.9};
        const double psi = searched_psi(cfg, initial_state_f1(cfg), std::nullopt);
        for (double pcom : {2.0, 10.0}) {
            for (double g : grid) {
                Cell cell;
                cell.scheme = BenchmarkScheme::proposed;
                cell.variant = "pcom_" + fmt(pcom) + "W";
                cell.param = "gamma_snr_min";
                cell.value = g;
                cell.cfg = cfg;
                cell.cfg.comm_power_max = pcom;
                cell.cfg.gamma_snr_min = g;
                cell.init = initial_state_f1(cell.cfg);
                cell.psi = psi;
                cells.push_back(std::move(cell));
            }
        }
        break;
    }
    case FigureId::velocity_vs_pcom: {
        std::vector<double> grid = spec.grid; // dB
        if (grid.empty()) grid = {3.0, 7.0, 10.0, 13.0};
        ScenarioConfig swept = cfg;
        const double beta = std::pow(10.0, 20.91 / 10.0);
        swept.comm_ref_gain = {beta, beta};
        const double psi = searched_psi(swept, initial_state_f1(swept), std::nullopt);
        for (double g : {0.6, 0.9}) {
            for (double p_db : grid) {
                Cell cell;
                cell.scheme = BenchmarkScheme::proposed;
                cell.variant = "gamma_" + fmt(g);
                cell.param = "pcom_max_dB";
                cell.value = p_db;
                cell.cfg = swept;
                cell.cfg.comm_power_max = std::pow(10.0, p_db / 10.0);
                cell.cfg.gamma_snr_min = g;
                cell.init = initial_state_f1(cell.cfg);
                cell.psi = psi;
                cells.push_back(std::move(cell));
            }
        }
        break;
    }
    }

    // --- run: realizations fan out over a work pool ---------------------------
    const std::string raw_path = (fs::path(spec.out_dir) / (std::string(figure_name(spec.figure)) + "_raw.csv")).string();
    const std::string agg_path = (fs::path(spec.out_dir) / (std::string(figure_name(spec.figure)) + "_agg.csv")).string();
    std::ofstream raw(raw_path, std::ios::trunc);
    if (!raw) return {2, "out_dir_unwritable: " + raw_path};
    for (std::size_t i = 0; i < raw_csv_columns().size(); ++i)
        raw << (i ? "," : "") << raw_csv_columns()[i];
    raw << '\n';

    struct CellResult {
        std::vector<std::vector<RawRow>> per_realization;
        std::string error;
    };

    std::vector<CellResult> results(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        CellResult& out = results[c];
        out.per_realization.resize(realizations);
        const DerivedConstants dc = derive_constants(cell.cfg);
        AoOptions opts = base_opts;
        opts.psi = cell.psi;

        std::vector<std::string> errors(realizations);
        parallel_for(realizations, [&](int r) {
            try {
                const Solution sol =
                    run_benchmark(cell.scheme, cell.cfg, dc, opts, cell.init, seeds[r]);
                std::vector<RawRow>& rows = out.per_realization[r];
                if (cell.keep_history) {
                    for (std::size_t it = 0; it < sol.state_history.size(); ++it)
                        rows.push_back(make_row(cell, r, static_cast<int>(it),
                                                sol.state_history[it], sol.coverage_history[it],
                                                cell.cfg, dc));
                } else {
                    rows.push_back(make_row(cell, r, sol.iterations, sol.state, sol.coverage,
                                            cell.cfg, dc));
                }
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        });
        for (int r = 0; r < realizations; ++r)
            if (!errors[r].empty() && out.error.empty())
                out.error = "infeasible_scenario: " + errors[r];

        // convergence histories are padded to the longest realization so the
        // mean curve is defined at every iteration
        if (cell.keep_history) {
            std::size_t t_max = 0;
            for (const auto& rows : out.per_realization) t_max = std::max(t_max, rows.size());
            for (auto& rows : out.per_realization) {
                while (!rows.empty() && rows.size() < t_max) {
                    RawRow pad = rows.back();
                    pad.iteration = static_cast<int>(rows.size());
                    rows.push_back(pad);
                }
            }
        }
        for (const auto& rows : out.per_realization)
            for (const RawRow& row : rows) write_raw(raw, figure_name(spec.figure), row);
        raw.flush(); // partial results survive a later failure
        if (!out.error.empty()) {
            status.exit_code = 2;
            status.error = out.error;
            return status;
        }
    }

    // --- aggregate -------------------------------------------------------------
    std::ofstream agg(agg_path, std::ios::trunc);
    for (std::size_t i = 0; i < agg_csv_columns().size(); ++i)
        agg << (i ? "," : "") << agg_csv_columns()[i];
    agg << '\n';
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Cell& cell = cells[c];
        // group rows by (param value, iteration) within the cell
        std::map<std::pair<double, int>, std::array<Moments, 6>> groups;
        for (const auto& rows : results[c].per_realization)
            for (const RawRow& row : rows) {
                auto& g = groups[{row.value, cell.keep_history ? row.iteration : 0}];
                g[0].add(row.coverage);
                g[1].add(row.mean_velocity);
                g[2].add(row.baseline);
                g[3].add(row.perp_baseline);
                g[4].add(std::isfinite(row.hoa) ? row.hoa : 0.0);
                g[5].add(std::isfinite(row.dh90) ? row.dh90 : 0.0);
            }
        for (const auto& [key, g] : groups) {
            agg << figure_name(spec.figure) << ',' << scheme_name(cell.scheme) << ','
                << cell.variant << ',' << cell.param << ','
                << fmt(cell.keep_history ? static_cast<double>(key.second) : key.first) << ','
                << g[0].n << ',' << fmt(g[0].mean()) << ',' << fmt(g[0].sigma()) << ','
                << fmt(g[1].mean()) << ',' << fmt(g[1].sigma()) << ',' << fmt(g[2].mean())
                << ',' << fmt(g[3].mean()) << ',' << fmt(g[4].mean()) << ',' << fmt(g[5].mean())
                << '\n';
        }
    }
    return status;
}

ExperimentStatus summarize(const std::string& dir, std::ostream& out) {
    namespace fs = std::filesystem;
    const fs::path raw_path = fs::path(dir) / "convergence_raw.csv";
    std::ifstream in(raw_path);
    if (!in) return {2, "missing_input: " + raw_path.string()};

    std::string header;
    std::getline(in, header);
    {
        std::stringstream hs(header);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(hs, tok, ',')) cols.push_back(tok);
        if (cols != raw_csv_columns()) return {3, "schema_error: unexpected columns in convergence_raw.csv"};
    }

    // final coverage per (scheme, init, realization): the highest iteration row
    std::map<std::tuple<std::string, std::string, int>, std::pair<int, double>> final_rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::vector<std::string> f;
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != raw_csv_columns().size())
            return {3, "schema_error: short row in convergence_raw.csv"};
        const std::string& scheme = f[1];
        const std::string& variant = f[2];
        const int realization = std::stoi(f[5]);
        const int iteration = std::stoi(f[6]);
        const double cov = std::stod(f[7]);
        auto& slot = final_rows[{scheme, variant, realization}];
        if (iteration >= slot.first) slot = {iteration, cov};
    }

    std::map<std::pair<std::string, std::string>, Moments> mean_final; // (variant, scheme)
    for (const auto& [key, val] : final_rows)
        mean_final[{std::get<1>(key), std::get<0>(key)}].add(val.second);

    std::vector<std::string> variants;
    for (const auto& [key, m] : mean_final)
        if (variants.empty() || variants.back() != key.first) variants.push_back(key.first);

    const fs::path out_path = fs::path(dir) / "summary.csv";
    std::ofstream sum(out_path, std::ios::trunc);
    sum << "init,scheme,mean_final_coverage_m2,gain_of_proposed_pct\n";
    out << "final mean coverage and proposed-scheme gains\n";
    for (const std::string& variant : variants) {
        const auto it_prop = mean_final.find({variant, "proposed"});
        const double prop = it_prop == mean_final.end() ? 0.0 : it_prop->second.mean();
        for (int s = 0; s < 4; ++s) {
            const auto it = mean_final.find({variant, kSchemeNames[s]});
            if (it == mean_final.end()) continue;
            const double mean = it->second.mean();
            double gain = 0.0;
            if (s != 0 && mean > 0.0) gain = (prop - mean) / mean * 100.0;
            sum << variant << ',' << kSchemeNames[s] << ',' << fmt(mean) << ',' << fmt(gain)
                << '\n';
            char buf[160];
            std::snprintf(buf, sizeof buf, "  %-4s %-26s %14.1f m^2  %+7.2f %%\n", variant.c_str(),
                          kSchemeNames[s], mean, gain);
            out << buf;
        }
    }
    return {};
}

} // namespace uavinsar
