#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavinsar {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Full mission parameter set. All fields are in canonical SI units
// (m, s, W, J, Hz, K, rad, linear power ratios); every dB / degree / Wh
// conversion happens at load time, never downstream.
//
// Defaults reproduce the reference configuration that ships in
// scenarios/table1.scn.
struct ScenarioConfig {
    // Mission discretization
    int n_slots = 80;            // N
    double slot_duration = 1.0;  // delta_t [s]

    // Radar geometry
    double target_x = 20.0;                            // x_t [m]
    double master_look_angle = 0.78539816339744831;    // theta_1 [rad] (45 deg)
    double slave_look_angle_min = 0.26179938779914944; // theta_min [rad] (15 deg)
    double slave_look_angle_max = 1.3089969389957472;  // theta_max [rad] (75 deg)
    double beamwidth_3db = 0.52359877559829887;        // Theta_3dB [rad] (30 deg)

    // Flight envelope
    double altitude_min = 1.0;    // z_min [m]
    double altitude_max = 100.0;  // z_max [m]
    double velocity_min = 0.1;    // v_min [m/s]
    double velocity_max = 10.0;   // v_max [m/s]
    double baseline_min = 2.0;    // b_min [m]

    // Per-UAV energy / radar power (index 0 = master U1, 1 = slave U2)
    std::array<double, 2> battery_capacity = {43992.0, 43992.0}; // E_max [J] (12.22 Wh)
    std::array<double, 2> radar_tx_power = {0.01, 0.01};         // P_t [W] (10 dBm)

    // Radar link budget (linear ratios)
    double antenna_gain_tx = 3.9810717055349722; // G_t (6 dBi)
    double antenna_gain_rx = 3.9810717055349722; // G_r (6 dBi)
    double wavelength = 0.12;                    // lambda [m]
    double center_frequency = 2.5e9;             // f_0 [Hz]
    double radar_bandwidth = 3.0e9;              // B_Rg [Hz]
    double pulse_duration = 1.0e-6;              // tau_p [s]
    double prf = 100.0;                          // PRF [Hz]
    double system_temperature = 400.0;           // T_sys [K]
    double noise_figure = 3.1622776601683795;    // F (5 dB)
    double loss_atmospheric = 1.0;               // L_atm (0 dB)
    double loss_system = 1.5848931924611136;     // L_sys (2 dB)
    double loss_azimuth = 1.5848931924611136;    // L_az (2 dB)
    double backscatter_coefficient = 0.1;        // sigma_0 (-10 dB)
    double boltzmann = 1.380649e-23;             // k_b [J/K]

    // InSAR quality requirements
    int bits_per_sample = 4;        // n_B
    int n_looks = 16;               // n_L
    double gamma_snr_min = 0.8;     // SNR decorrelation floor
    double gamma_rg_min = 0.8;      // baseline decorrelation floor
    double gamma_other = 0.8;       // other decorrelation sources
    double hoa_min = 1.0;           // h_amb^min [m]
    double height_error_max = 0.224; // Delta h^max [m]

    // Communication link (per UAV)
    std::array<double, 2> comm_bandwidth = {1.0e9, 1.0e9};                     // B_c [Hz]
    std::array<double, 2> comm_ref_gain = {74.989420933245579, 74.989420933245579}; // beta_c (18.75 dB)
    double comm_power_max = 10.0;  // P_com^max [W] (10 dBW)
    Vec3 gs_position = {0.0, -270.0, 5.0}; // ground station [m]

    // Rotary-wing propulsion model
    double rotor_profile_drag = 0.0012;   // delta_u
    double air_density = 1.225;           // rho [kg/m^3]
    double rotor_solidity = 0.05;         // s
    double rotor_disc_area = 0.503;       // A_e [m^2]
    double blade_angular_velocity = 300.0; // Omega [rad/s]
    double rotor_radius = 0.4;            // R [m]
    double induced_power_factor = 0.1;    // k_u
    double uav_weight = 60.0;             // W_u [N]
    double tip_speed = 120.0;             // U_tip [m/s]
    double fuselage_drag_ratio = 0.6;     // d_0

    // Optimizer parameters
    int pso_population = 2000;     // D
    int pso_max_iterations = 200;  // M_1
    double pso_cognitive = 0.1;    // c_1
    double pso_social = 0.2;       // c_2
    double pso_velocity_max = 20.0; // v_PSO^max [m/s]
    double search_offset = 500.0;  // O [m]
    double eps_coverage = 1.0e-4;  // eps_1
    double eps_bisection = 1.0e-4; // eps_2
    double eps_sca = 1.0e-4;       // eps_3
    double eps_ao = 1.0e-4;        // eps_4
    double eps_psi = 1.0e-2;       // eps_5
    int realizations = 1000;

    void validate() const; // throws ScenarioError on any broken invariant
};

// Constants derived once from a validated config.
struct DerivedConstants {
    std::array<double, 2> gamma_r = {0.0, 0.0}; // SNR numerator bundle [m^4/s]
    double blade_profile_power = 0.0;           // P_0 [W]
    double induced_power_hover = 0.0;           // P_I [W]
    double rotor_induced_velocity = 0.0;        // v_0 [m/s]
    double fractional_bandwidth = 0.0;          // B_p
    double a1_slope = 0.0;                      // A_1 [1/m]
    double a1_offset = 0.0;                     // A_2
};

inline constexpr double kSpeedOfLight = 299792458.0; // [m/s]

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(std::istream& in, std::vector<std::string>* warnings = nullptr);

// Canonical SI key=value dump; load(serialize(cfg)) is bit-exact.
std::string serialize_scenario(const ScenarioConfig& cfg);

// Applies environment overrides UAVINSAR_<KEY>=<value [unit]> for any
// scenario key. Returns the keys that were overridden.
std::vector<std::string> apply_env_overrides(ScenarioConfig& cfg,
                                             const std::string& prefix = "UAVINSAR_");

// Sets one key from a "value [unit]" string (same grammar as the file format).
void set_scenario_key(ScenarioConfig& cfg, const std::string& key, const std::string& value);

DerivedConstants derive_constants(const ScenarioConfig& cfg);

} // namespace uavinsar
