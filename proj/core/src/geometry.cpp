#include "uavinsar/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace uavinsar {

namespace {
constexpr double kHalfPi = 1.57079632679489662;
}

BaselineDecomposition baseline_components(const FormationState& f, double theta_1) {
    BaselineDecomposition d;
    const double dx = f.slave.x - f.master.x;
    const double dz = f.slave.z - f.master.z;
    d.b = std::hypot(dx, dz);
    if (d.b == 0.0) return d; // coincident pair: alpha := 0, both components 0
    d.alpha = std::atan2(dz, dx);
    d.b_perp = d.b * std::abs(std::cos(theta_1 - d.alpha));
    d.b_par = d.b * std::abs(std::sin(theta_1 - d.alpha));
    return d;
}

double slant_range(const AcrossTrackPosition& q, double x_t) {
    return std::hypot(q.x - x_t, q.z);
}

double master_x_from_altitude(double z1, double x_t, double theta_1) {
    return x_t - z1 * std::tan(theta_1);
}

double slave_look_angle(const AcrossTrackPosition& q2, double x_t) {
    if (q2.z <= 0.0) throw GeometryError("slave look angle undefined for z2 <= 0");
    return std::atan((x_t - q2.x) / q2.z);
}

SwathBounds footprint_bounds(const AcrossTrackPosition& q, double look_angle, double beamwidth) {
    const double lo = look_angle - beamwidth / 2.0;
    const double hi = look_angle + beamwidth / 2.0;
    if (hi >= kHalfPi || lo <= -kHalfPi)
        throw GeometryError("grazing geometry: footprint edge at or beyond the horizon");
    return {q.x + q.z * std::tan(lo), q.x + q.z * std::tan(hi)};
}

double effective_slave_look_angle(const FormationState& f, double x_t) {
    if (f.slave_look_pin) return *f.slave_look_pin;
    return slave_look_angle(f.slave, x_t);
}

double usable_swath(const FormationState& f, double x_t, double theta_1, double beamwidth) {
    const SwathBounds m = footprint_bounds(f.master, theta_1, beamwidth);
    const SwathBounds s = footprint_bounds(f.slave, effective_slave_look_angle(f, x_t), beamwidth);
    const double overlap = std::min(m.far, s.far) - std::max(m.near, s.near);
    return std::max(overlap, 0.0);
}

double coverage_from_swath(double swath, std::span<const double> v_y, double delta_t) {
    double along_track = 0.0;
    for (std::size_t n = 0; n + 1 < v_y.size(); ++n) along_track += v_y[n];
    return swath * along_track * delta_t;
}

double coverage(const FormationState& f, double x_t, double theta_1, double beamwidth,
                std::span<const double> v_y, double delta_t) {
    return coverage_from_swath(usable_swath(f, x_t, theta_1, beamwidth), v_y, delta_t);
}

std::vector<double> along_track_positions(std::span<const double> v_y, double delta_t) {
    std::vector<double> y(v_y.size(), 0.0);
    for (std::size_t n = 1; n < v_y.size(); ++n) y[n] = y[n - 1] + v_y[n - 1] * delta_t;
    return y;
}

} // namespace uavinsar
