#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "foldhinge/random.hpp"
#include "foldhinge/recovery.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace foldhinge;
using namespace foldhinge::recovery;

namespace {

RecoveryTrace trace_from(const TwoPhaseModel& m, double design_deg, double noise = 0.0, std::uint64_t seed = 0) {
    rng::NormalStream rng(seed);
    RecoveryTrace t;
    t.hold_duration_min = 180.0;
    t.design_angle_deg = design_deg;
    for (int k = 0; k <= 60; ++k) {
        const double rate = m(k) * (1.0 + noise * rng.normal());
        t.samples.push_back({static_cast<double>(k), rate * design_deg});
    }
    return t;
}

}  // namespace

TEST_CASE("recovery rate", "[recovery]") {
    CHECK(recovery_rate(60.0, 60.0) == 1.0);
    CHECK(recovery_rate(0.0, 60.0) == 0.0);
    CHECK_THAT(recovery_rate(0.85 * 51.0, 51.0), WithinAbs(0.85, 1e-15));
    CHECK_THROWS_AS(recovery_rate(10.0, 0.0), Error);
    for (double k : {0.1, 2.0, 7.5}) CHECK_THAT(recovery_rate(40.0 * k, 51.0 * k), WithinRel(40.0 / 51.0, 1e-15));
}

TEST_CASE("rate interpolation", "[recovery]") {
    RecoveryTrace t{60.0, 100.0, {{0.0, 60.0}, {30.0, 85.0}}};
    CHECK_THAT(rate_at(t, 15.0), WithinAbs(0.725, 1e-15));
    CHECK(rate_at(t, 0.0) == 0.6);
    CHECK(rate_at(t, 30.0) == 0.85);
    CHECK_THROWS_AS(rate_at(t, 31.0), Error);
    CHECK_THROWS_AS(rate_at(t, -1.0), Error);
}

TEST_CASE("monotone traces give monotone interpolants", "[recovery][property]") {
    rng::NormalStream rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        RecoveryTrace t{60.0, 90.0, {}};
        double time = 0.0;
        double angle = 20.0 + 30.0 * rng.uniform();
        for (int k = 0; k < 12; ++k) {
            t.samples.push_back({time, angle});
            time += 0.5 + 5.0 * rng.uniform();
            angle = std::min(179.0, angle + 5.0 * rng.uniform());
        }
        double previous = -1.0;
        for (int q = 0; q <= 200; ++q) {
            const double at = std::min(t.samples.back().t_min, t.samples.back().t_min * q / 200.0);
            const double r = rate_at(t, at);
            CHECK(r >= previous);
            previous = r;
        }
    }
}

TEST_CASE("two-phase fit recovers noiseless parameters", "[recovery][fit]") {
    const TwoPhaseModel truth{0.6, 0.25, 10.0};
    const auto fit = fit_two_phase(trace_from(truth, 51.0));
    CHECK_THAT(fit.model.r_inst, WithinRel(0.6, 0.01));
    CHECK_THAT(fit.model.r_slow, WithinRel(0.25, 0.01));
    CHECK_THAT(fit.model.tau_min, WithinRel(10.0, 0.01));
    CHECK(fit.rmse < 1e-8);
    CHECK_FALSE(fit.exceeds_design);
}

TEST_CASE("two-phase fit of a flat trace", "[recovery][fit]") {
    RecoveryTrace t{120.0, 60.0, {}};
    for (int k = 0; k <= 30; k += 5) t.samples.push_back({static_cast<double>(k), 0.85 * 60.0});
    const auto fit = fit_two_phase(t);
    CHECK_THAT(fit.model.r_inst, WithinAbs(0.85, 1e-6));
    CHECK_THAT(fit.model.r_slow, WithinAbs(0.0, 1e-6));
    CHECK_THAT(rate_at(t, 30.0), WithinAbs(0.85, 1e-15));
}

TEST_CASE("two-phase fit with 1% noise", "[recovery][fit]") {
    const TwoPhaseModel truth{0.6, 0.25, 10.0};
    const auto fit = fit_two_phase(trace_from(truth, 51.0, 0.01, 17));
    CHECK_THAT(fit.model.tau_min, WithinRel(10.0, 0.10));
    CHECK(fit.rmse < 0.02);
}

TEST_CASE("two-phase fit flags recovery beyond the design angle", "[recovery][fit]") {
    const TwoPhaseModel truth{0.9, 0.2, 5.0};
    const auto fit = fit_two_phase(trace_from(truth, 60.0));
    CHECK(fit.exceeds_design);
}

TEST_CASE("two-phase fit errors", "[recovery][fit]") {
    RecoveryTrace t{60.0, 60.0, {{0.0, 40.0}, {10.0, 45.0}, {20.0, 48.0}}};
    CHECK_THROWS_AS(fit_two_phase(t), Error);
    RecoveryTrace unordered{60.0, 60.0, {{0.0, 40.0}, {10.0, 45.0}, {5.0, 48.0}, {20.0, 49.0}}};
    CHECK_THROWS_AS(fit_two_phase(unordered), Error);
}
