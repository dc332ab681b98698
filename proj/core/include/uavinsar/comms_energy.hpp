#pragma once

#include "uavinsar/geometry.hpp"
#include "uavinsar/scenario.hpp"

#include <array>
#include <span>
#include <vector>

namespace uavinsar {

// UAV-to-GS link state for one slot.
struct LinkState {
    int uav = 0;             // 0 = master, 1 = slave
    int slot = 0;
    double distance = 0.0;   // d_{i,n} [m]
    double p_com = 0.0;      // [W]
    double bandwidth = 0.0;  // B_c [Hz]
    double ref_gain = 0.0;   // beta_c (linear)
};

// 3-D distance from a UAV at across-track position q, along-track y, to the GS.
double gs_distance(const AcrossTrackPosition& q, double y, const Vec3& gs);

// Free-space LoS throughput B_c log2(1 + P beta / d^2) [bit/s].
double throughput(const LinkState& link);
double throughput(double bandwidth, double p_com, double ref_gain, double distance);

// Minimum communication power achieving `rate` at squared distance d2
// (inverse of the throughput expression; used by C11 reformulations).
double min_power_for_rate(double rate, double bandwidth, double ref_gain, double d2);

// SAR raw-data rate requirement of one platform [bit/s]. Throws on grazing
// geometry (footprint edge at the horizon).
double min_data_rate(double z, double look_angle, const ScenarioConfig& cfg);

// Rotary-wing propulsion power at forward speed v >= 0 [W].
double propulsion_power(double v, const ScenarioConfig& cfg, const DerivedConstants& dc);

// Induced-power term of the propulsion model alone (the slack variable u of
// the resource subproblem tracks exactly this quantity).
double induced_power(double v, const DerivedConstants& dc);

// Mission energy of one UAV: delta_t * sum_n (P_prop + P_t + P_com[n]) [J].
double total_energy(std::span<const double> p_com, std::span<const double> v_y, double p_t,
                    const ScenarioConfig& cfg, const DerivedConstants& dc);

// Per-slot energy breakdown for reporting.
struct EnergyLedger {
    std::vector<double> propulsion;            // [W] per slot, shared velocity profile
    std::array<double, 2> radar = {0.0, 0.0};  // [W] per slot, constant per UAV
    std::array<std::vector<double>, 2> comms;  // [W] per slot per UAV
    std::array<double, 2> total = {0.0, 0.0};  // [J] per UAV
};

EnergyLedger energy_ledger(std::span<const double> p_com_1, std::span<const double> p_com_2,
                           std::span<const double> v_y, const ScenarioConfig& cfg,
                           const DerivedConstants& dc);

} // namespace uavinsar
