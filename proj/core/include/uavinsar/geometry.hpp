#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace uavinsar {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// UAV position in the across-track (xz) plane. x is ground range, z altitude.
struct AcrossTrackPosition {
    double x = 0.0;
    double z = 0.0;
};

// Master/slave pair. The master is the platform farther from the reference
// line (r2 <= r1); its look angle theta_1 is fixed by the scenario. The slave
// beam normally points at the reference line; a pinned look angle (the
// fixed-slave-look-angle benchmark) replaces that steering law with a
// constant.
struct FormationState {
    AcrossTrackPosition master;
    AcrossTrackPosition slave;
    std::optional<double> slave_look_pin;
};

struct BaselineDecomposition {
    double b = 0.0;      // full baseline [m]
    double b_perp = 0.0; // component perpendicular to the master LOS [m]
    double b_par = 0.0;  // component along the master LOS [m]
    double alpha = 0.0;  // baseline tilt vs horizontal [rad], atan2(z2-z1, x2-x1)
};

// b_perp and b_par are magnitudes, so b^2 = b_perp^2 + b_par^2 always holds.
// For a coincident pair alpha is defined as 0.
BaselineDecomposition baseline_components(const FormationState& f, double theta_1);

double slant_range(const AcrossTrackPosition& q, double x_t);

// C2: master x pinned so its footprint is centered on the reference line.
double master_x_from_altitude(double z1, double x_t, double theta_1);

// Slave look angle toward the reference line, magnitude convention
// arctan((x_t - x2) / z2) so that the C14 bounds are satisfiable for
// side-looking geometries (x2 <= x_t). Throws for z2 <= 0.
double slave_look_angle(const AcrossTrackPosition& q2, double x_t);

// The angle the slave beam actually uses: the pin when present, the steering
// law above otherwise.
double effective_slave_look_angle(const FormationState& f, double x_t);

struct SwathBounds {
    double near = 0.0;
    double far = 0.0;
};

// Single-footprint ground interval of one platform; throws when either edge
// ray grazes (look angle +- half beamwidth reaching pi/2).
SwathBounds footprint_bounds(const AcrossTrackPosition& q, double look_angle, double beamwidth);

// Usable swath: overlap of both footprints, clamped at zero.
double usable_swath(const FormationState& f, double x_t, double theta_1, double beamwidth);

// Covered area: swath times along-track distance of the first N-1 slots.
double coverage_from_swath(double swath, std::span<const double> v_y, double delta_t);
double coverage(const FormationState& f, double x_t, double theta_1, double beamwidth,
                std::span<const double> v_y, double delta_t);

// Along-track positions y[n] accumulated from the velocity profile; y[0] = 0.
std::vector<double> along_track_positions(std::span<const double> v_y, double delta_t);

} // namespace uavinsar
