#include <doctest.h>

#include "uavinsar/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>

using namespace uavinsar;

TEST_CASE("empty file keeps every reference default and validates") {
    std::istringstream empty("");
    const ScenarioConfig cfg = parse_scenario(empty);
    const ScenarioConfig ref;
    CHECK(cfg.n_slots == ref.n_slots);
    CHECK(cfg.master_look_angle == ref.master_look_angle);
    CHECK(cfg.battery_capacity[0] == ref.battery_capacity[0]);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("reference file reproduces the table values in SI units") {
    const ScenarioConfig cfg = load_scenario(SCENARIO_DIR "/table1.scn");
    CHECK(cfg.master_look_angle == doctest::Approx(M_PI / 4).epsilon(1e-12));
    CHECK(cfg.beamwidth_3db == doctest::Approx(M_PI / 6).epsilon(1e-12));
    CHECK(cfg.battery_capacity[0] == doctest::Approx(43992.0)); // 12.22 Wh
    CHECK(cfg.battery_capacity[1] == doctest::Approx(43992.0));
    CHECK(cfg.radar_tx_power[0] == doctest::Approx(0.01)); // 10 dBm
    CHECK(cfg.comm_power_max == doctest::Approx(10.0));    // 10 dBW
    CHECK(cfg.comm_ref_gain[0] == doctest::Approx(std::pow(10.0, 1.875)));
    CHECK(cfg.noise_figure == doctest::Approx(std::pow(10.0, 0.5)));
    CHECK(cfg.loss_atmospheric == doctest::Approx(1.0)); // 0 dB
    CHECK(cfg.backscatter_coefficient == doctest::Approx(0.1));
    CHECK(cfg.gs_position.y == doctest::Approx(-270.0));
    CHECK(cfg.realizations == 1000);
}

TEST_CASE("unit conversions") {
    ScenarioConfig cfg;
    SUBCASE("Wh to J by hand") {
        set_scenario_key(cfg, "battery_capacity", "12.22 Wh");
        CHECK(cfg.battery_capacity[0] == doctest::Approx(12.22 * 3600.0).epsilon(1e-14));
        CHECK(cfg.battery_capacity[0] == doctest::Approx(43992.0).epsilon(1e-14));
    }
    SUBCASE("dB at zero is exactly one") {
        set_scenario_key(cfg, "loss_system", "0 dB");
        CHECK(cfg.loss_system == 1.0);
    }
    SUBCASE("degrees to radians") {
        set_scenario_key(cfg, "master_look_angle", "45 deg");
        CHECK(cfg.master_look_angle == doctest::Approx(M_PI / 4).epsilon(1e-14));
    }
    SUBCASE("GHz") {
        set_scenario_key(cfg, "radar_bandwidth", "3 GHz");
        CHECK(cfg.radar_bandwidth == 3.0e9);
    }
    SUBCASE("dBm") {
        set_scenario_key(cfg, "radar_tx_power", "10 dBm");
        CHECK(cfg.radar_tx_power[0] == doctest::Approx(0.01).epsilon(1e-14));
    }
    SUBCASE("per-UAV suffix keys") {
        set_scenario_key(cfg, "comm_bandwidth_2", "2 GHz");
        CHECK(cfg.comm_bandwidth[0] == 1.0e9);
        CHECK(cfg.comm_bandwidth[1] == 2.0e9);
    }
}

TEST_CASE("parse and validation errors") {
    ScenarioConfig cfg;
    CHECK_THROWS_AS(set_scenario_key(cfg, "prf", "abc"), ScenarioError);
    CHECK_THROWS_AS(set_scenario_key(cfg, "prf", "100 parsec"), ScenarioError);
    CHECK_THROWS_AS(set_scenario_key(cfg, "n_slots", "2.5"), ScenarioError);
    CHECK_THROWS_AS(set_scenario_key(cfg, "prf", "100 Hz extra"), ScenarioError);

    SUBCASE("negative bandwidth rejected at validation") {
        std::istringstream in("radar_bandwidth = -1 GHz\n");
        CHECK_THROWS_AS(parse_scenario(in), ScenarioError);
    }
    SUBCASE("look angle ordering enforced") {
        std::istringstream in("slave_look_angle_min = 50 deg\n");
        CHECK_THROWS_AS(parse_scenario(in), ScenarioError);
    }
    SUBCASE("threshold outside (0,1] rejected") {
        std::istringstream in("gamma_snr_min = 1.2\n");
        CHECK_THROWS_AS(parse_scenario(in), ScenarioError);
    }
    SUBCASE("unknown keys warn but do not fail") {
        std::istringstream in("no_such_key = 3\nprf = 200 Hz\n");
        std::vector<std::string> warnings;
        const ScenarioConfig parsed = parse_scenario(in, &warnings);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("no_such_key") != std::string::npos);
        CHECK(parsed.prf == 200.0);
    }
}

TEST_CASE("serialize/load round trip is bit exact") {
    const ScenarioConfig cfg = load_scenario(SCENARIO_DIR "/table1.scn");
    const std::string canonical = serialize_scenario(cfg);
    std::istringstream in(canonical);
    const ScenarioConfig again = parse_scenario(in);
    CHECK(serialize_scenario(again) == canonical);
    CHECK(std::memcmp(&cfg.master_look_angle, &again.master_look_angle, sizeof(double)) == 0);
    CHECK(std::memcmp(&cfg.comm_ref_gain, &again.comm_ref_gain, sizeof cfg.comm_ref_gain) == 0);
    CHECK(std::memcmp(&cfg.boltzmann, &again.boltzmann, sizeof(double)) == 0);
}

TEST_CASE("environment overrides") {
    ScenarioConfig cfg;
    setenv("UAVINSAR_GAMMA_SNR_MIN", "0.65", 1);
    const auto applied = apply_env_overrides(cfg);
    unsetenv("UAVINSAR_GAMMA_SNR_MIN");
    REQUIRE(applied.size() == 1);
    CHECK(applied[0] == "gamma_snr_min");
    CHECK(cfg.gamma_snr_min == doctest::Approx(0.65));
}

TEST_CASE("derived constants against independent arithmetic") {
    const ScenarioConfig cfg;
    const DerivedConstants dc = derive_constants(cfg);

    const double p0 = 0.0012 / 8.0 * 1.225 * 0.05 * 0.503 * 300.0 * 300.0 * 300.0 * 0.4 * 0.4 * 0.4;
    const double pi_h = 1.1 * std::pow(60.0, 1.5) / std::sqrt(2.0 * 1.225 * 0.503);
    const double v0 = std::sqrt(60.0 / (2.0 * 1.225 * 0.503));
    CHECK(dc.blade_profile_power == doctest::Approx(p0).epsilon(1e-12));
    CHECK(dc.induced_power_hover == doctest::Approx(pi_h).epsilon(1e-12));
    CHECK(dc.rotor_induced_velocity == doctest::Approx(v0).epsilon(1e-12));

    CHECK(dc.blade_profile_power == doctest::Approx(7.99).epsilon(0.005));
    CHECK(dc.induced_power_hover == doctest::Approx(460.5).epsilon(0.005));
    CHECK(dc.rotor_induced_velocity == doctest::Approx(6.98).epsilon(0.005));

    CHECK(dc.fractional_bandwidth == doctest::Approx(1.2).epsilon(1e-12));

    // radar constant cross-checked in the log domain
    const double db_sum = -10.0 + 10.0 * std::log10(0.01) + 2.0 * 6.0 +
                          30.0 * std::log10(0.12) + 10.0 * std::log10(kSpeedOfLight) +
                          10.0 * std::log10(1e-6) + 10.0 * std::log10(100.0) -
                          10.0 * std::log10(256.0 * M_PI * M_PI * M_PI) -
                          10.0 * std::log10(1.380649e-23) - 10.0 * std::log10(400.0) -
                          10.0 * std::log10(3e9) - 5.0 - 0.0 - 2.0 - 2.0;
    CHECK(10.0 * std::log10(dc.gamma_r[0]) == doctest::Approx(db_sum).epsilon(1e-9));
    CHECK(dc.gamma_r[1] == dc.gamma_r[0]);

    // data-rate exponent constants match the sensing-rate model
    const double dsec = 1.0 / std::cos(cfg.master_look_angle + cfg.beamwidth_3db / 2) -
                        1.0 / std::cos(cfg.master_look_angle - cfg.beamwidth_3db / 2);
    CHECK(dc.a1_slope ==
          doctest::Approx(4.0 * 3e9 * 100.0 * dsec / (kSpeedOfLight * 1e9)).epsilon(1e-12));
    CHECK(dc.a1_offset == doctest::Approx(4.0 * 3e9 * 100.0 * 1e-6 / 1e9).epsilon(1e-12));
}

TEST_CASE("derived constants zero-weight case") {
    ScenarioConfig cfg;
    cfg.induced_power_factor = 0.0;
    cfg.uav_weight = 0.0;
    const DerivedConstants dc = derive_constants(cfg);
    CHECK(dc.induced_power_hover == 0.0);
    CHECK(dc.rotor_induced_velocity == 0.0);
}

TEST_CASE("derive_constants is pure") {
    const ScenarioConfig a, b;
    const DerivedConstants da = derive_constants(a), db = derive_constants(b);
    CHECK(da.gamma_r[0] == db.gamma_r[0]);
    CHECK(da.a1_slope == db.a1_slope);
    CHECK(da.a1_offset == db.a1_offset);
}
