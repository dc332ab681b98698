#pragma once

#include "uavinsar/geometry.hpp"
#include "uavinsar/scenario.hpp"

#include <stdexcept>
#include <vector>

namespace uavinsar {

class MetricsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- SNR and coherence -----------------------------------------------------

// Radar SNR of one platform in one slot: gamma_r / (v r^3 sin(theta)).
// Throws for non-positive velocity, range, or look angle (nadir-looking SAR
// is invalid).
double sar_snr(double gamma_r, double v, double slant_range, double look_angle);

// 1 / SNR; well defined down to r = 0 (returns 0), used by feasibility code.
double inverse_sar_snr(double gamma_r, double v, double slant_range, double look_angle);

// Product over both platforms of 1 / sqrt(1 + 1/SNR_i), in (0, 1].
double snr_decorrelation(double inv_snr_1, double inv_snr_2);
double snr_decorrelation(const FormationState& f, double x_t, double theta_1, double v,
                         const DerivedConstants& dc);

// Baseline (range) decorrelation of the slave look angle against the master.
// Equals 1 at theta_2 = theta_1 and decreases as theta_2 drops below theta_1.
double baseline_decorrelation(double theta_2, double theta_1, double fractional_bandwidth);

// Height of ambiguity lambda r1 sin(theta_1) / b_perp; throws when b_perp = 0
// (no across-track sensitivity, HoA unbounded).
double height_of_ambiguity(double wavelength, double r1, double theta_1, double b_perp);
double height_of_ambiguity(const FormationState& f, double wavelength, double theta_1, double x_t);

// --- Phase error statistics -------------------------------------------------

struct PhaseErrorModel {
    double gamma = 0.0; // coherence in [0, 1)
    int n_looks = 1;
    int grid_size = 4096; // uniform samples over [-pi, pi]
};

// Midpoint-sampled density over [-pi, pi]: value[i] at x0 + (i + 0.5) h.
struct SampledPdf {
    std::vector<double> value;
    double h = 0.0;
    double x0 = 0.0;
};

// Multilook interferometric phase-error density (Gamma / Gauss-2F1 form).
// Throws for gamma outside [0, 1) or a non-convergent series.
SampledPdf phase_error_pdf(const PhaseErrorModel& model);

struct DeltaPhi90 {
    double value = 0.0; // [rad], on [0, 2 pi]
    bool saturated = false;
};

// 90th percentile of the point-to-point phase error: the x solving
// int_{-x}^{x} (p (*) p) = 0.9 with p the sampled density above and (*) the
// linear self-convolution on [-2 pi, 2 pi].
DeltaPhi90 delta_phi_90(double gamma, int n_looks, double eps, int grid_size = 4096);

// Memoized variant (read-mostly table keyed by (gamma, n_looks)).
double delta_phi_90_cached(double gamma, int n_looks);

// 90% relative height error h_amb * dphi90 / (2 pi).
double relative_height_error(double h_amb, double delta_phi90);

// Worst-case coherence used by constraint C9.
inline double worst_case_coherence(const ScenarioConfig& cfg) {
    return cfg.gamma_snr_min * cfg.gamma_rg_min * cfg.gamma_other;
}

namespace detail {
// Gauss hypergeometric 2F1(a, b; c; x) for 0 <= x < 1. Power series with
// term-ratio stopping; Euler transformation above x = 0.95 where the direct
// series decays too slowly.
double hyp2f1(double a, double b, double c, double x);
// Gamma(n + 1/2) / Gamma(n) by exact recursion for integer n >= 1.
double gamma_half_ratio(int n);
} // namespace detail

} // namespace uavinsar
