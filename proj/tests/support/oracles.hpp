#pragma once

// Test-side oracles, independent of the library's solution paths.

#include "uavinsar/insar_metrics.hpp"
#include "uavinsar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace uavinsar::oracles {

// Monte-Carlo 90th percentile of |phi_a - phi_b| with both phases drawn from
// the sampled phase-error density by inverse-CDF sampling.
inline double delta_phi_90_monte_carlo(double gamma, int n_looks, int samples,
                                       std::uint64_t seed) {
    const SampledPdf pdf = phase_error_pdf({gamma, n_looks, 4096});
    std::vector<double> cdf(pdf.value.size() + 1, 0.0);
    for (std::size_t i = 0; i < pdf.value.size(); ++i)
        cdf[i + 1] = cdf[i] + pdf.value[i] * pdf.h;
    const double total = cdf.back();

    SplitMix64 rng(seed);
    auto draw = [&] {
        const double u = rng.uniform01() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t cell = std::min<std::size_t>(it - cdf.begin() - 1, pdf.value.size() - 1);
        const double frac = (u - cdf[cell]) / std::max(cdf[cell + 1] - cdf[cell], 1e-300);
        return pdf.x0 + (cell + frac) * pdf.h;
    };

    std::vector<double> diffs(samples);
    for (int i = 0; i < samples; ++i) diffs[i] = std::abs(draw() - draw());
    const std::size_t k = static_cast<std::size_t>(0.9 * samples);
    std::nth_element(diffs.begin(), diffs.begin() + k, diffs.end());
    return diffs[k];
}

// Trapezoid integral of a midpoint-sampled density.
inline double integrate(const SampledPdf& pdf) {
    double sum = 0.0;
    for (double p : pdf.value) sum += p;
    return sum * pdf.h;
}

} // namespace uavinsar::oracles
