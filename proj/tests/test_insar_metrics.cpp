#include <doctest.h>

#include "support/oracles.hpp"
#include "uavinsar/insar_metrics.hpp"

#include <cmath>

using namespace uavinsar;

TEST_CASE("SAR SNR scalings") {
    const double g = 7.8e5;
    const double base = sar_snr(g, 4.0, 141.42, M_PI / 4);
    CHECK(sar_snr(g, 8.0, 141.42, M_PI / 4) == doctest::Approx(base / 2).epsilon(1e-12));
    CHECK(sar_snr(g, 4.0, 2 * 141.42, M_PI / 4) == doctest::Approx(base / 8).epsilon(1e-12));
    CHECK_THROWS_AS(sar_snr(g, 4.0, 141.42, 0.0), MetricsError);
    CHECK_THROWS_AS(sar_snr(g, 0.0, 141.42, M_PI / 4), MetricsError);

    // log-domain re-evaluation
    const double db = 10 * std::log10(g) - 10 * std::log10(4.0) -
                      30 * std::log10(141.42) - 10 * std::log10(std::sin(M_PI / 4));
    CHECK(10 * std::log10(base) == doctest::Approx(db).epsilon(1e-9));

    CHECK(inverse_sar_snr(g, 4.0, 141.42, M_PI / 4) == doctest::Approx(1.0 / base).epsilon(1e-12));
    CHECK(inverse_sar_snr(g, 4.0, 0.0, M_PI / 4) == 0.0); // well defined at r = 0
}

TEST_CASE("SNR decorrelation limits and monotonicity") {
    CHECK(snr_decorrelation(0.0, 0.0) == doctest::Approx(1.0)); // noiseless
    CHECK(snr_decorrelation(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12)); // SNR = 1 each
    double prev = 1.0;
    for (double v = 0.5; v <= 8.0; v += 0.5) {
        const double g = snr_decorrelation(v * 0.01, v * 0.02);
        CHECK(g < prev);
        CHECK(g > 0.0);
        CHECK(g <= 1.0);
        prev = g;
    }
}

TEST_CASE("baseline decorrelation") {
    const double th1 = M_PI / 4;
    CHECK(baseline_decorrelation(th1, th1, 1.2) == doctest::Approx(1.0).epsilon(1e-14));

    // plug-in evaluation at the reference slave angle, rebuilt symbolically
    const double th2 = std::atan(100.0 / 90.0);
    const double expected = ((2 + 1.2) * std::sin(th2) - (2 - 1.2) * std::sin(th1)) /
                            (1.2 * (std::sin(th1) + std::sin(th2)));
    CHECK(baseline_decorrelation(th2, th1, 1.2) == doctest::Approx(expected).epsilon(1e-14));

    // strictly decreasing as theta_2 falls away below theta_1 (the regime in
    // which the C7 floor can bind)
    double prev = 1.0;
    for (double d = 0.01; d < 0.5; d += 0.01) {
        const double g = baseline_decorrelation(th1 - d, th1, 1.2);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("height of ambiguity") {
    CHECK(height_of_ambiguity(0.12, 141.42, M_PI / 4, 7.071) ==
          doctest::Approx(0.12 * 141.42 * std::sin(M_PI / 4) / 7.071).epsilon(1e-12));
    CHECK(height_of_ambiguity(0.12, 141.421356, M_PI / 4, 7.0710678) ==
          doctest::Approx(1.697).epsilon(1e-3));
    // inverse proportionality in the perpendicular baseline
    const double h1 = height_of_ambiguity(0.12, 100.0, M_PI / 4, 3.0);
    CHECK(height_of_ambiguity(0.12, 100.0, M_PI / 4, 6.0) == doctest::Approx(h1 / 2));
    CHECK(h1 * 3.0 == doctest::Approx(height_of_ambiguity(0.12, 100.0, M_PI / 4, 6.0) * 6.0));
    CHECK_THROWS_AS(height_of_ambiguity(0.12, 100.0, M_PI / 4, 0.0), MetricsError);
}

TEST_CASE("2F1 special values") {
    CHECK(detail::hyp2f1(16.0, 1.0, 0.5, 0.0) == 1.0);
    // 2F1(1, 1; 1/2; x) has terms (1)_k / (1/2)_k x^k; cross-check a short
    // hand sum at small x
    const double x = 0.01;
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 30; ++k) {
        term *= (1.0 + k) * (1.0 + k) / ((0.5 + k) * (k + 1.0)) * x;
        sum += term;
    }
    CHECK(detail::hyp2f1(1.0, 1.0, 0.5, x) == doctest::Approx(sum).epsilon(1e-13));
    // both branches against high-precision reference values
    CHECK(detail::hyp2f1(4.0, 1.0, 0.5, 0.9499) ==
          doctest::Approx(2374855.21281351).epsilon(1e-10)); // direct series
    CHECK(detail::hyp2f1(4.0, 1.0, 0.5, 0.9501) ==
          doctest::Approx(2418244.24651057).epsilon(1e-10)); // Euler branch
    CHECK(detail::hyp2f1(16.0, 1.0, 0.5, 0.9501) ==
          doctest::Approx(2.07715167365213e22).epsilon(1e-10));
    CHECK_THROWS_AS(detail::hyp2f1(16.0, 1.0, 0.5, 1.0), MetricsError);
}

TEST_CASE("gamma half ratio matches lgamma") {
    for (int n = 1; n <= 32; ++n) {
        const double expected = std::exp(std::lgamma(n + 0.5) - std::lgamma(n));
        CHECK(detail::gamma_half_ratio(n) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("phase PDF normalization grid") {
    for (double gamma : {0.0, 0.25, 0.5, 0.75, 0.95}) {
        for (int nl : {1, 4, 16}) {
            const SampledPdf pdf = phase_error_pdf({gamma, nl, 4096});
            CHECK(oracles::integrate(pdf) == doctest::Approx(1.0).epsilon(1e-6));
            for (double p : pdf.value) CHECK(p >= 0.0);
        }
    }
}

TEST_CASE("zero coherence is the uniform density") {
    const SampledPdf pdf = phase_error_pdf({0.0, 16, 4096});
    for (double p : pdf.value) CHECK(p == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-12));
}

TEST_CASE("phase PDF symmetry") {
    const SampledPdf pdf = phase_error_pdf({0.512, 16, 4096});
    const std::size_t k = pdf.value.size();
    for (std::size_t i = 0; i < k / 2; ++i)
        CHECK(pdf.value[i] == doctest::Approx(pdf.value[k - 1 - i]).epsilon(1e-10));
}

TEST_CASE("phase PDF rejects invalid inputs") {
    CHECK_THROWS_AS(phase_error_pdf({1.0, 16, 4096}), MetricsError);
    CHECK_THROWS_AS(phase_error_pdf({-0.1, 16, 4096}), MetricsError);
    CHECK_THROWS_AS(phase_error_pdf({0.5, 0, 4096}), MetricsError);
}

TEST_CASE("delta phi 90 monotone in coherence and looks") {
    double prev = 2 * M_PI + 1;
    for (double gamma : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const double x = delta_phi_90(gamma, 16, 1e-6).value;
        CHECK(x <= prev + 1e-12);
        prev = x;
    }
    CHECK(delta_phi_90(0.6, 16, 1e-6).value <= delta_phi_90(0.6, 4, 1e-6).value + 1e-12);
    CHECK(delta_phi_90(0.6, 4, 1e-6).value <= delta_phi_90(0.6, 1, 1e-6).value + 1e-12);
    // high coherence concentrates the mass near zero
    CHECK(delta_phi_90(0.995, 16, 1e-6).value < 0.1);
}

TEST_CASE("convolved density normalizes and the percentile is grid stable") {
    const double base = delta_phi_90(0.512, 16, 1e-6, 4096).value;
    const double fine = delta_phi_90(0.512, 16, 1e-6, 8192).value;
    CHECK(std::abs(base - fine) < 1e-4);
}

TEST_CASE("delta phi 90 agrees with the Monte-Carlo oracle") {
    // one combination in the unit suite; the acceptance suite runs the grid
    const double eq14 = delta_phi_90(0.512, 16, 1e-6).value;
    const double mc = oracles::delta_phi_90_monte_carlo(0.512, 16, 1000000, 777);
    CHECK(std::abs(eq14 - mc) < 1e-2);
}

TEST_CASE("cached delta phi matches the direct evaluation") {
    CHECK(delta_phi_90_cached(0.512, 16) == doctest::Approx(delta_phi_90(0.512, 16, 1e-6).value));
    CHECK(delta_phi_90_cached(0.512, 16) == delta_phi_90_cached(0.512, 16)); // memo hit
}

TEST_CASE("relative height error") {
    CHECK(relative_height_error(1.7, 2 * M_PI) == doctest::Approx(1.7)); // full cycle
    CHECK(relative_height_error(1.7, 0.0) == 0.0);
    // halving b_perp doubles the error at fixed coherence: error ~ h_amb
    const double dphi = 0.7;
    const double h1 = height_of_ambiguity(0.12, 100.0, M_PI / 4, 6.0);
    const double h2 = height_of_ambiguity(0.12, 100.0, M_PI / 4, 3.0);
    CHECK(relative_height_error(h2, dphi) ==
          doctest::Approx(2.0 * relative_height_error(h1, dphi)).epsilon(1e-12));
}

TEST_CASE("worst-case coherence from the thresholds") {
    ScenarioConfig cfg;
    CHECK(worst_case_coherence(cfg) == doctest::Approx(0.512).epsilon(1e-12)); // 0.8^3
}
