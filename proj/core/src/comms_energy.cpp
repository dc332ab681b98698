#include "uavinsar/comms_energy.hpp"

#include <cmath>
#include <stdexcept>

namespace uavinsar {

double gs_distance(const AcrossTrackPosition& q, double y, const Vec3& gs) {
    const double dx = q.x - gs.x;
    const double dy = y - gs.y;
    const double dz = q.z - gs.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double throughput(double bandwidth, double p_com, double ref_gain, double distance) {
    return bandwidth * std::log2(1.0 + p_com * ref_gain / (distance * distance));
}

double throughput(const LinkState& link) {
    return throughput(link.bandwidth, link.p_com, link.ref_gain, link.distance);
}

double min_power_for_rate(double rate, double bandwidth, double ref_gain, double d2) {
    return (std::exp2(rate / bandwidth) - 1.0) * d2 / ref_gain;
}

double min_data_rate(double z, double look_angle, const ScenarioConfig& cfg) {
    const double half_beam = cfg.beamwidth_3db / 2.0;
    const double hi = look_angle + half_beam;
    const double lo = look_angle - half_beam;
    if (hi >= 1.57079632679489662 || lo <= -1.57079632679489662)
        throw GeometryError("grazing geometry: sensing data rate undefined");
    const double echo_window = z / kSpeedOfLight * (1.0 / std::cos(hi) - 1.0 / std::cos(lo));
    return cfg.bits_per_sample * cfg.radar_bandwidth * cfg.prf * (echo_window + cfg.pulse_duration);
}

double induced_power(double v, const DerivedConstants& dc) {
    const double v0_sq = dc.rotor_induced_velocity * dc.rotor_induced_velocity;
    if (v0_sq == 0.0) return dc.induced_power_hover; // zero-weight degenerate case
    const double w = v * v / (2.0 * v0_sq);
    // sqrt(1 + w^2) - w rewritten to avoid cancellation at high speed
    const double surd = 1.0 / (std::sqrt(1.0 + w * w) + w);
    return dc.induced_power_hover * std::sqrt(surd);
}

double propulsion_power(double v, const ScenarioConfig& cfg, const DerivedConstants& dc) {
    const double blade = dc.blade_profile_power *
                         (1.0 + 3.0 * v * v / (cfg.tip_speed * cfg.tip_speed));
    const double parasite = 0.5 * cfg.fuselage_drag_ratio * cfg.air_density *
                            cfg.rotor_solidity * cfg.rotor_disc_area * v * v * v;
    return blade + induced_power(v, dc) + parasite;
}

double total_energy(std::span<const double> p_com, std::span<const double> v_y, double p_t,
                    const ScenarioConfig& cfg, const DerivedConstants& dc) {
    if (p_com.size() != v_y.size())
        throw std::invalid_argument("total_energy: power and velocity lengths differ");
    double sum = 0.0;
    for (std::size_t n = 0; n < v_y.size(); ++n)
        sum += propulsion_power(v_y[n], cfg, dc) + p_t + p_com[n];
    return cfg.slot_duration * sum;
}

EnergyLedger energy_ledger(std::span<const double> p_com_1, std::span<const double> p_com_2,
                           std::span<const double> v_y, const ScenarioConfig& cfg,
                           const DerivedConstants& dc) {
    EnergyLedger ledger;
    ledger.propulsion.reserve(v_y.size());
    for (double v : v_y) ledger.propulsion.push_back(propulsion_power(v, cfg, dc));
    ledger.radar = {cfg.radar_tx_power[0], cfg.radar_tx_power[1]};
    ledger.comms[0].assign(p_com_1.begin(), p_com_1.end());
    ledger.comms[1].assign(p_com_2.begin(), p_com_2.end());
    for (int i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (std::size_t n = 0; n < v_y.size(); ++n)
            sum += ledger.propulsion[n] + ledger.radar[i] + ledger.comms[i][n];
        ledger.total[i] = cfg.slot_duration * sum;
    }
    return ledger;
}

} // namespace uavinsar
