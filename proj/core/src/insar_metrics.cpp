#include "uavinsar/insar_metrics.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <string>

namespace uavinsar {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

namespace detail {

double gamma_half_ratio(int n) {
    if (n < 1) throw MetricsError("gamma_half_ratio requires n >= 1");
    double ratio = std::sqrt(kPi) / 2.0; // Gamma(1.5) / Gamma(1)
    for (int k = 1; k < n; ++k) ratio *= (k + 0.5) / k;
    return ratio;
}

namespace {

double hyp2f1_series(double a, double b, double c, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if (std::abs(term) <= 1e-14 * std::abs(sum)) return sum;
    }
    throw MetricsError("2F1 series did not converge: a=" + std::to_string(a) +
                       " b=" + std::to_string(b) + " c=" + std::to_string(c) +
                       " x=" + std::to_string(x));
}

} // namespace

double hyp2f1(double a, double b, double c, double x) {
    if (x < 0.0 || x >= 1.0) throw MetricsError("2F1 evaluated outside [0, 1)");
    if (x == 0.0) return 1.0;
    if (x > 0.95) {
        // Euler transformation; converges geometrically where the direct
        // series stalls (requires c - a - b > 0, true for the phase PDF).
        return std::pow(1.0 - x, c - a - b) * hyp2f1_series(c - a, c - b, c, x);
    }
    return hyp2f1_series(a, b, c, x);
}

} // namespace detail

double sar_snr(double gamma_r, double v, double slant_range, double look_angle) {
    if (v <= 0.0) throw MetricsError("SAR SNR undefined for non-positive velocity");
    if (slant_range <= 0.0) throw MetricsError("SAR SNR undefined for non-positive range");
    if (look_angle <= 0.0) throw MetricsError("SAR SNR undefined at nadir (sin(theta) = 0)");
    return gamma_r / (v * std::pow(slant_range, 3) * std::sin(look_angle));
}

double inverse_sar_snr(double gamma_r, double v, double slant_range, double look_angle) {
    return v * std::pow(slant_range, 3) * std::sin(look_angle) / gamma_r;
}

double snr_decorrelation(double inv_snr_1, double inv_snr_2) {
    return 1.0 / std::sqrt((1.0 + inv_snr_1) * (1.0 + inv_snr_2));
}

double snr_decorrelation(const FormationState& f, double x_t, double theta_1, double v,
                         const DerivedConstants& dc) {
    const double i1 = inverse_sar_snr(dc.gamma_r[0], v, slant_range(f.master, x_t), theta_1);
    const double i2 = inverse_sar_snr(dc.gamma_r[1], v, slant_range(f.slave, x_t),
                                      effective_slave_look_angle(f, x_t));
    return snr_decorrelation(i1, i2);
}

double baseline_decorrelation(double theta_2, double theta_1, double fractional_bandwidth) {
    const double s1 = std::sin(theta_1);
    const double s2 = std::sin(theta_2);
    const double bp = fractional_bandwidth;
    return ((2.0 + bp) * s2 - (2.0 - bp) * s1) / (bp * (s1 + s2));
}

double height_of_ambiguity(double wavelength, double r1, double theta_1, double b_perp) {
    if (b_perp <= 0.0)
        throw MetricsError("height of ambiguity unbounded: perpendicular baseline is zero");
    return wavelength * r1 * std::sin(theta_1) / b_perp;
}

double height_of_ambiguity(const FormationState& f, double wavelength, double theta_1, double x_t) {
    const auto base = baseline_components(f, theta_1);
    return height_of_ambiguity(wavelength, slant_range(f.master, x_t), theta_1, base.b_perp);
}

SampledPdf phase_error_pdf(const PhaseErrorModel& model) {
    if (model.gamma < 0.0 || model.gamma >= 1.0)
        throw MetricsError("phase PDF requires coherence in [0, 1)");
    if (model.n_looks < 1) throw MetricsError("phase PDF requires n_looks >= 1");
    if (model.grid_size < 16) throw MetricsError("phase PDF grid too coarse");

    const double g = model.gamma;
    const double g2 = g * g;
    const int nl = model.n_looks;
    const double one_minus = std::pow(1.0 - g2, nl);
    const double front = detail::gamma_half_ratio(nl) * one_minus * g / (2.0 * std::sqrt(kPi));

    SampledPdf pdf;
    pdf.h = kTwoPi / model.grid_size;
    pdf.x0 = -kPi;
    pdf.value.resize(model.grid_size);
    for (int i = 0; i < model.grid_size; ++i) {
        const double phi = pdf.x0 + (i + 0.5) * pdf.h;
        const double cphi = std::cos(phi);
        const double x = g2 * cphi * cphi;
        const double first = front * cphi / std::pow(1.0 - x, nl + 0.5);
        const double second = one_minus / kTwoPi * detail::hyp2f1(nl, 1.0, 0.5, x);
        double p = first + second;
        if (p < 0.0) {
            // the two terms cancel to ~1e-13 of their magnitude in the tails
            if (p < -1e-10)
                throw MetricsError("phase PDF evaluated negative: " + std::to_string(p));
            p = 0.0;
        }
        pdf.value[i] = p;
    }
    return pdf;
}

DeltaPhi90 delta_phi_90(double gamma, int n_looks, double eps, int grid_size) {
    if (gamma >= 1.0) throw MetricsError("delta_phi_90 requires coherence < 1");
    const SampledPdf pdf = phase_error_pdf({gamma, n_looks, grid_size});
    const int k = grid_size;
    const double h = pdf.h;

    // Linear self-convolution on [-2 pi, 2 pi]; q[m] lives at z = (m - k + 1) h.
    std::vector<double> q(2 * k - 1, 0.0);
    for (int i = 0; i < k; ++i) {
        const double pi_h = pdf.value[i] * h;
        for (int j = 0; j < k; ++j) q[i + j] += pi_h * pdf.value[j];
    }

    // Symmetric cumulative mass from the center outward; the density of the
    // difference is even, so F(x) = q(0) h + sum of mirrored pairs.
    const int center = k - 1;
    double mass = q[center] * h;
    if (mass >= 0.9) return {0.5 * h * 0.9 / std::max(mass, 1e-300), false};
    double prev_mass = mass;
    for (int d = 1; d <= center; ++d) {
        mass += (q[center + d] + q[center - d]) * h;
        if (mass >= 0.9) {
            // Interpolate inside the last cell pair to the requested tolerance.
            const double frac = (0.9 - prev_mass) / std::max(mass - prev_mass, 1e-300);
            double x = (d - 1 + frac) * h + 0.5 * h;
            if (eps > 0) x = std::min(x, kTwoPi);
            return {x, false};
        }
        prev_mass = mass;
    }
    return {kTwoPi, true};
}

double delta_phi_90_cached(double gamma, int n_looks) {
    struct Key {
        std::uint64_t bits;
        int nl;
        bool operator<(const Key& o) const { return bits != o.bits ? bits < o.bits : nl < o.nl; }
    };
    static std::map<Key, double> table;
    static std::mutex mutex;
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof gamma);
    std::memcpy(&bits, &gamma, sizeof bits);
    const Key key{bits, n_looks};
    {
        std::lock_guard lock(mutex);
        if (auto it = table.find(key); it != table.end()) return it->second;
    }
    const double value = delta_phi_90(gamma, n_looks, 1e-6).value;
    std::lock_guard lock(mutex);
    return table.emplace(key, value).first->second;
}

double relative_height_error(double h_amb, double delta_phi90) {
    return h_amb * delta_phi90 / kTwoPi;
}

} // namespace uavinsar
