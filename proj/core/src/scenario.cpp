#include "uavinsar/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace uavinsar {

namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_to_si(double value, const std::string& unit) {
    if (unit.empty()) return value;
    // identity units, accepted for readability
    static const char* kIdentity[] = {"s",   "m",    "m/s",  "Hz",  "K",  "N",
                                      "W",   "J",    "rad",  "rad/s", "kg/m3",
                                      "kg/m^3", "m2", "m^2", "bits", "looks"};
    for (const char* u : kIdentity)
        if (unit == u) return value;
    if (unit == "ms") return value * 1e-3;
    if (unit == "us") return value * 1e-6;
    if (unit == "km") return value * 1e3;
    if (unit == "kHz") return value * 1e3;
    if (unit == "MHz") return value * 1e6;
    if (unit == "GHz") return value * 1e9;
    if (unit == "mW") return value * 1e-3;
    if (unit == "kW") return value * 1e3;
    if (unit == "Wh") return value * 3600.0;
    if (unit == "kWh") return value * 3.6e6;
    if (unit == "deg" || unit == "\xc2\xb0") return value * kPi / 180.0;
    if (unit == "dB" || unit == "dBi" || unit == "dBW") return std::pow(10.0, value / 10.0);
    if (unit == "dBm") return std::pow(10.0, (value - 30.0) / 10.0);
    throw ScenarioError("unknown unit '" + unit + "'");
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct KeyBinding {
    std::function<void(ScenarioConfig&, double)> set;
    std::function<double(const ScenarioConfig&)> get;
    bool integral = false;
};

using KeyTable = std::map<std::string, KeyBinding>;

// Single registry used by the parser, the serializer, and the env override
// path so the three can never drift apart.
const KeyTable& key_table() {
    static const KeyTable table = [] {
        KeyTable t;
        auto field = [&t](const std::string& key, double ScenarioConfig::* member) {
            t[key] = {[member](ScenarioConfig& c, double v) { c.*member = v; },
                      [member](const ScenarioConfig& c) { return c.*member; },
                      false};
        };
        auto int_field = [&t](const std::string& key, int ScenarioConfig::* member) {
            t[key] = {[member](ScenarioConfig& c, double v) { c.*member = static_cast<int>(v); },
                      [member](const ScenarioConfig& c) { return static_cast<double>(c.*member); },
                      true};
        };
        auto pair_field = [&t](const std::string& key, std::array<double, 2> ScenarioConfig::* member) {
            t[key] = {[member](ScenarioConfig& c, double v) { (c.*member)[0] = (c.*member)[1] = v; },
                      [member](const ScenarioConfig& c) { return (c.*member)[0]; },
                      false};
            for (int i = 0; i < 2; ++i) {
                t[key + "_" + std::to_string(i + 1)] = {
                    [member, i](ScenarioConfig& c, double v) { (c.*member)[i] = v; },
                    [member, i](const ScenarioConfig& c) { return (c.*member)[i]; },
                    false};
            }
        };

        int_field("n_slots", &ScenarioConfig::n_slots);
        field("slot_duration", &ScenarioConfig::slot_duration);
        field("target_x", &ScenarioConfig::target_x);
        field("master_look_angle", &ScenarioConfig::master_look_angle);
        field("slave_look_angle_min", &ScenarioConfig::slave_look_angle_min);
        field("slave_look_angle_max", &ScenarioConfig::slave_look_angle_max);
        field("beamwidth_3db", &ScenarioConfig::beamwidth_3db);
        field("altitude_min", &ScenarioConfig::altitude_min);
        field("altitude_max", &ScenarioConfig::altitude_max);
        field("velocity_min", &ScenarioConfig::velocity_min);
        field("velocity_max", &ScenarioConfig::velocity_max);
        field("baseline_min", &ScenarioConfig::baseline_min);
        pair_field("battery_capacity", &ScenarioConfig::battery_capacity);
        pair_field("radar_tx_power", &ScenarioConfig::radar_tx_power);
        field("antenna_gain_tx", &ScenarioConfig::antenna_gain_tx);
        field("antenna_gain_rx", &ScenarioConfig::antenna_gain_rx);
        field("wavelength", &ScenarioConfig::wavelength);
        field("center_frequency", &ScenarioConfig::center_frequency);
        field("radar_bandwidth", &ScenarioConfig::radar_bandwidth);
        field("pulse_duration", &ScenarioConfig::pulse_duration);
        field("prf", &ScenarioConfig::prf);
        field("system_temperature", &ScenarioConfig::system_temperature);
        field("noise_figure", &ScenarioConfig::noise_figure);
        field("loss_atmospheric", &ScenarioConfig::loss_atmospheric);
        field("loss_system", &ScenarioConfig::loss_system);
        field("loss_azimuth", &ScenarioConfig::loss_azimuth);
        field("backscatter_coefficient", &ScenarioConfig::backscatter_coefficient);
        field("boltzmann", &ScenarioConfig::boltzmann);
        int_field("bits_per_sample", &ScenarioConfig::bits_per_sample);
        int_field("n_looks", &ScenarioConfig::n_looks);
        field("gamma_snr_min", &ScenarioConfig::gamma_snr_min);
        field("gamma_rg_min", &ScenarioConfig::gamma_rg_min);
        field("gamma_other", &ScenarioConfig::gamma_other);
        field("hoa_min", &ScenarioConfig::hoa_min);
        field("height_error_max", &ScenarioConfig::height_error_max);
        pair_field("comm_bandwidth", &ScenarioConfig::comm_bandwidth);
        pair_field("comm_ref_gain", &ScenarioConfig::comm_ref_gain);
        field("comm_power_max", &ScenarioConfig::comm_power_max);
        t["gs_x"] = {[](ScenarioConfig& c, double v) { c.gs_position.x = v; },
                     [](const ScenarioConfig& c) { return c.gs_position.x; }, false};
        t["gs_y"] = {[](ScenarioConfig& c, double v) { c.gs_position.y = v; },
                     [](const ScenarioConfig& c) { return c.gs_position.y; }, false};
        t["gs_z"] = {[](ScenarioConfig& c, double v) { c.gs_position.z = v; },
                     [](const ScenarioConfig& c) { return c.gs_position.z; }, false};
        field("rotor_profile_drag", &ScenarioConfig::rotor_profile_drag);
        field("air_density", &ScenarioConfig::air_density);
        field("rotor_solidity", &ScenarioConfig::rotor_solidity);
        field("rotor_disc_area", &ScenarioConfig::rotor_disc_area);
        field("blade_angular_velocity", &ScenarioConfig::blade_angular_velocity);
        field("rotor_radius", &ScenarioConfig::rotor_radius);
        field("induced_power_factor", &ScenarioConfig::induced_power_factor);
        field("uav_weight", &ScenarioConfig::uav_weight);
        field("tip_speed", &ScenarioConfig::tip_speed);
        field("fuselage_drag_ratio", &ScenarioConfig::fuselage_drag_ratio);
        int_field("pso_population", &ScenarioConfig::pso_population);
        int_field("pso_max_iterations", &ScenarioConfig::pso_max_iterations);
        field("pso_cognitive", &ScenarioConfig::pso_cognitive);
        field("pso_social", &ScenarioConfig::pso_social);
        field("pso_velocity_max", &ScenarioConfig::pso_velocity_max);
        field("search_offset", &ScenarioConfig::search_offset);
        field("eps_coverage", &ScenarioConfig::eps_coverage);
        field("eps_bisection", &ScenarioConfig::eps_bisection);
        field("eps_sca", &ScenarioConfig::eps_sca);
        field("eps_ao", &ScenarioConfig::eps_ao);
        field("eps_psi", &ScenarioConfig::eps_psi);
        int_field("realizations", &ScenarioConfig::realizations);
        return t;
    }();
    return table;
}

// Serialization order: deterministic and stable for golden files.
const std::vector<std::string>& serialization_order() {
    static const std::vector<std::string> order = {
        "n_slots", "slot_duration", "target_x", "master_look_angle",
        "slave_look_angle_min", "slave_look_angle_max", "beamwidth_3db",
        "altitude_min", "altitude_max", "velocity_min", "velocity_max",
        "baseline_min", "battery_capacity_1", "battery_capacity_2",
        "radar_tx_power_1", "radar_tx_power_2", "antenna_gain_tx",
        "antenna_gain_rx", "wavelength", "center_frequency", "radar_bandwidth",
        "pulse_duration", "prf", "system_temperature", "noise_figure",
        "loss_atmospheric", "loss_system", "loss_azimuth",
        "backscatter_coefficient", "boltzmann", "bits_per_sample", "n_looks",
        "gamma_snr_min", "gamma_rg_min", "gamma_other", "hoa_min",
        "height_error_max", "comm_bandwidth_1", "comm_bandwidth_2",
        "comm_ref_gain_1", "comm_ref_gain_2", "comm_power_max", "gs_x", "gs_y",
        "gs_z", "rotor_profile_drag", "air_density", "rotor_solidity",
        "rotor_disc_area", "blade_angular_velocity", "rotor_radius",
        "induced_power_factor", "uav_weight", "tip_speed",
        "fuselage_drag_ratio", "pso_population", "pso_max_iterations",
        "pso_cognitive", "pso_social", "pso_velocity_max", "search_offset",
        "eps_coverage", "eps_bisection", "eps_sca", "eps_ao", "eps_psi",
        "realizations"};
    return order;
}

double parse_value_with_unit(const std::string& text) {
    std::istringstream in(text);
    std::string num_tok, unit_tok, extra;
    in >> num_tok;
    if (num_tok.empty()) throw ScenarioError("missing value");
    in >> unit_tok;
    if (in >> extra) throw ScenarioError("trailing tokens after '" + unit_tok + "'");
    std::size_t pos = 0;
    double value;
    try {
        value = std::stod(num_tok, &pos);
    } catch (const std::exception&) {
        throw ScenarioError("not a number: '" + num_tok + "'");
    }
    if (pos != num_tok.size()) throw ScenarioError("not a number: '" + num_tok + "'");
    return unit_to_si(value, unit_tok);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ScenarioError("invalid scenario: " + what);
}

} // namespace

void set_scenario_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = key_table();
    auto it = table.find(key);
    if (it == table.end()) throw ScenarioError("unknown key '" + key + "'");
    double v = parse_value_with_unit(value);
    if (it->second.integral && std::abs(v - std::round(v)) > 1e-9)
        throw ScenarioError("key '" + key + "' expects an integer, got " + value);
    it->second.set(cfg, v);
}

ScenarioConfig parse_scenario(std::istream& in, std::vector<std::string>* warnings) {
    ScenarioConfig cfg;
    const auto& table = key_table();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(line_no) + ": expected 'key = value [unit]'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = table.find(key);
        if (it == table.end()) {
            if (warnings) warnings->push_back("unknown key '" + key + "' (line " + std::to_string(line_no) + ")");
            continue;
        }
        try {
            set_scenario_key(cfg, key, value);
        } catch (const ScenarioError& e) {
            throw ScenarioError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::vector<std::string> warnings;
    ScenarioConfig cfg = parse_scenario(in, &warnings);
    for (const auto& w : warnings) std::fprintf(stderr, "scenario warning: %s\n", w.c_str());
    return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
    const auto& table = key_table();
    std::string out;
    char buf[64];
    for (const auto& key : serialization_order()) {
        const auto& binding = table.at(key);
        double v = binding.get(cfg);
        if (binding.integral)
            std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        else
            std::snprintf(buf, sizeof buf, "%.17g", v);
        out += key;
        out += " = ";
        out += buf;
        out += '\n';
    }
    return out;
}

std::vector<std::string> apply_env_overrides(ScenarioConfig& cfg, const std::string& prefix) {
    std::vector<std::string> applied;
    for (const auto& [key, binding] : key_table()) {
        (void)binding;
        std::string env_name = prefix;
        for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* raw = std::getenv(env_name.c_str())) {
            set_scenario_key(cfg, key, raw);
            applied.push_back(key);
        }
    }
    if (!applied.empty()) cfg.validate();
    return applied;
}

void ScenarioConfig::validate() const {
    require(n_slots >= 2, "n_slots must be >= 2");
    require(slot_duration > 0, "slot_duration must be positive");
    require(beamwidth_3db > 0 && beamwidth_3db < kPi, "beamwidth out of range");
    require(master_look_angle > 0 && master_look_angle < kPi / 2, "master look angle out of (0, pi/2)");
    require(slave_look_angle_min > 0 && slave_look_angle_max < kPi / 2,
            "slave look angle bounds out of (0, pi/2)");
    require(slave_look_angle_min < master_look_angle && master_look_angle < slave_look_angle_max,
            "need theta_min < theta_1 < theta_max");
    require(altitude_min > 0 && altitude_min < altitude_max, "need 0 < z_min < z_max");
    require(velocity_min > 0 && velocity_min < velocity_max, "need 0 < v_min < v_max");
    require(baseline_min > 0, "baseline_min must be positive");
    for (int i = 0; i < 2; ++i) {
        require(battery_capacity[i] > 0, "battery capacity must be positive");
        require(radar_tx_power[i] > 0, "radar tx power must be positive");
        require(comm_bandwidth[i] > 0, "comm bandwidth must be positive");
        require(comm_ref_gain[i] > 0, "comm reference gain must be positive");
    }
    require(antenna_gain_tx > 0 && antenna_gain_rx > 0, "antenna gains must be positive");
    require(wavelength > 0, "wavelength must be positive");
    require(center_frequency > 0, "center frequency must be positive");
    require(radar_bandwidth > 0, "radar bandwidth must be positive");
    require(pulse_duration > 0, "pulse duration must be positive");
    require(prf > 0, "PRF must be positive");
    require(system_temperature > 0, "system temperature must be positive");
    require(noise_figure > 0 && loss_atmospheric > 0 && loss_system > 0 && loss_azimuth > 0,
            "noise figure and losses must be positive linear ratios");
    require(backscatter_coefficient > 0, "backscatter coefficient must be positive");
    require(boltzmann > 0, "Boltzmann constant must be positive");
    require(bits_per_sample >= 1, "bits_per_sample must be >= 1");
    require(n_looks >= 1, "n_looks must be >= 1");
    auto in_unit = [](double g) { return g > 0 && g <= 1.0; };
    require(in_unit(gamma_snr_min) && in_unit(gamma_rg_min) && in_unit(gamma_other),
            "decorrelation thresholds must lie in (0, 1]");
    require(hoa_min > 0, "hoa_min must be positive");
    require(height_error_max > 0, "height_error_max must be positive");
    require(comm_power_max > 0, "comm_power_max must be positive");
    require(rotor_profile_drag > 0 && air_density > 0 && rotor_solidity > 0 &&
                rotor_disc_area > 0 && blade_angular_velocity > 0 && rotor_radius > 0,
            "rotor parameters must be positive");
    require(induced_power_factor >= 0 && uav_weight >= 0, "k_u and W_u must be non-negative");
    require(tip_speed > 0, "tip speed must be positive");
    require(fuselage_drag_ratio >= 0, "fuselage drag ratio must be non-negative");
    require(pso_population >= 1 && pso_max_iterations >= 1, "PSO sizes must be >= 1");
    require(pso_cognitive >= 0 && pso_social >= 0, "PSO constants must be non-negative");
    require(pso_velocity_max > 0, "pso_velocity_max must be positive");
    require(search_offset > 0, "search offset must be positive");
    require(eps_coverage > 0 && eps_bisection > 0 && eps_sca > 0 && eps_ao > 0,
            "error tolerances must be positive");
    require(eps_psi > 0 && eps_psi < 1, "eps_psi must lie in (0, 1)");
    require(realizations >= 1, "realizations must be >= 1");
}

DerivedConstants derive_constants(const ScenarioConfig& cfg) {
    DerivedConstants d;
    const double radar_denominator = 256.0 * kPi * kPi * kPi * cfg.boltzmann *
                                     cfg.system_temperature * cfg.radar_bandwidth *
                                     cfg.noise_figure * cfg.loss_atmospheric *
                                     cfg.loss_system * cfg.loss_azimuth;
    for (int i = 0; i < 2; ++i) {
        d.gamma_r[i] = cfg.backscatter_coefficient * cfg.radar_tx_power[i] *
                       cfg.antenna_gain_tx * cfg.antenna_gain_rx *
                       std::pow(cfg.wavelength, 3) * kSpeedOfLight *
                       cfg.pulse_duration * cfg.prf / radar_denominator;
    }
    d.blade_profile_power = cfg.rotor_profile_drag / 8.0 * cfg.air_density *
                            cfg.rotor_solidity * cfg.rotor_disc_area *
                            std::pow(cfg.blade_angular_velocity, 3) *
                            std::pow(cfg.rotor_radius, 3);
    const double disc_loading = 2.0 * cfg.air_density * cfg.rotor_disc_area;
    d.induced_power_hover =
        (1.0 + cfg.induced_power_factor) * std::pow(cfg.uav_weight, 1.5) / std::sqrt(disc_loading);
    d.rotor_induced_velocity = std::sqrt(cfg.uav_weight / disc_loading);
    d.fractional_bandwidth = cfg.radar_bandwidth / cfg.center_frequency;

    // Exponent of the master data-rate constraint rewritten as
    // 2^(A_1 z_1 + A_2): A_1 carries the altitude-dependent echo-window term,
    // A_2 the pulse-duration term, both normalized by the master link
    // bandwidth.
    const double half_beam = cfg.beamwidth_3db / 2.0;
    const double window_slope = 1.0 / std::cos(cfg.master_look_angle + half_beam) -
                                1.0 / std::cos(cfg.master_look_angle - half_beam);
    const double rate_scale = cfg.bits_per_sample * cfg.radar_bandwidth * cfg.prf;
    d.a1_slope = rate_scale * window_slope / (kSpeedOfLight * cfg.comm_bandwidth[0]);
    d.a1_offset = rate_scale * cfg.pulse_duration / cfg.comm_bandwidth[0];
    return d;
}

} // namespace uavinsar
