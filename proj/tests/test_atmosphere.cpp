#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "foldhinge/atmosphere.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace foldhinge;
using namespace foldhinge::atmosphere;

TEST_CASE("mean wind interpolation", "[atmosphere][wind]") {
    const WindProfile p({{0.0, 0.0, 0.0}, {10000.0, 20.0, 0.0}});
    CHECK(mean_wind(p, 0.0) == WindVector{0.0, 0.0});
    CHECK(mean_wind(p, 10000.0) == WindVector{20.0, 0.0});
    CHECK(mean_wind(p, 5000.0) == WindVector{10.0, 0.0});
    CHECK(mean_wind(p, 20000.0) == WindVector{20.0, 0.0});
    CHECK(mean_wind(p, -100.0) == WindVector{0.0, 0.0});

    const WindProfile single({{3000.0, 5.0, -2.0}});
    CHECK(mean_wind(single, 0.0) == WindVector{5.0, -2.0});
    CHECK(mean_wind(single, 9000.0) == WindVector{5.0, -2.0});

    CHECK_THROWS_AS(mean_wind(WindProfile{}, 10.0), Error);
    CHECK_THROWS_AS(WindProfile({{0.0, 1.0, 1.0}, {0.0, 2.0, 2.0}}), Error);
}

TEST_CASE("mean wind is exact at nodes and continuous", "[atmosphere][wind][property]") {
    const WindProfile p({{0.0, 4.0, 1.0}, {2000.0, 12.0, 2.0}, {5000.0, 21.0, 3.0}, {10000.0, 40.0, 3.0}});
    for (const auto& n : p.nodes()) {
        CHECK(mean_wind(p, n.altitude_m) == WindVector{n.east_mps, n.north_mps});
        const auto below = mean_wind(p, n.altitude_m - 1e-6);
        const auto above = mean_wind(p, n.altitude_m + 1e-6);
        CHECK_THAT(below.east, WithinAbs(n.east_mps, 1e-7));
        CHECK_THAT(above.east, WithinAbs(n.east_mps, 1e-7));
    }
}

TEST_CASE("zero-intensity gusts stay at rest", "[atmosphere][dryden]") {
    const auto params = DrydenParams::calm();
    auto s = GustState::stationary(params, 9);
    for (int k = 0; k < 10000; ++k) {
        s = dryden_step(s, params, 0.1);
        REQUIRE(s.u_mps == 0.0);
        REQUIRE(s.v_mps == 0.0);
    }
}

TEST_CASE("gust sequences are reproducible", "[atmosphere][dryden]") {
    const DrydenParams params;
    auto a = GustState::at_rest(123);
    auto b = GustState::at_rest(123);
    auto c = GustState::at_rest(124);
    bool differs = false;
    for (int k = 0; k < 1000; ++k) {
        a = dryden_step(a, params, 0.1);
        b = dryden_step(b, params, 0.1);
        c = dryden_step(c, params, 0.1);
        REQUIRE(a.u_mps == b.u_mps);
        REQUIRE(a.v_mps == b.v_mps);
        differs = differs || a.u_mps != c.u_mps;
    }
    CHECK(differs);
}

TEST_CASE("gust variance and correlation time", "[atmosphere][dryden][statistics]") {
    const DrydenParams params{1.0, 1.0, 200.0, 200.0, 10.0};
    auto s = GustState::stationary(params, 2024);
    std::vector<double> u;
    std::vector<double> v;
    for (int k = 0; k < 100000; ++k) {
        s = dryden_step(s, params, 0.1);
        u.push_back(s.u_mps);
        v.push_back(s.v_mps);
    }
    // tau = 20 s = 200 steps; 1e5 steps give ~250 correlation times.
    const auto su = oracle::series_stats(u, 0.1);
    const auto sv = oracle::series_stats(v, 0.1);
    CHECK_THAT(0.5 * (su.variance + sv.variance), WithinRel(1.0, 0.05));
    CHECK_THAT(0.5 * (su.correlation_time + sv.correlation_time), WithinRel(20.0, 0.10));
}

TEST_CASE("unstable gust step is rejected", "[atmosphere][dryden]") {
    const DrydenParams params{1.0, 1.0, 10.0, 10.0, 10.0};
    CHECK_THROWS_AS(dryden_step(GustState::at_rest(1), params, 1.0), Error);
    CHECK_THROWS_AS(dryden_step(GustState::at_rest(1), params, 0.0), Error);
    CHECK_NOTHROW(dryden_step(GustState::at_rest(1), params, 0.99));
}

TEST_CASE("gust track interpolates a fixed grid", "[atmosphere][dryden]") {
    const DrydenParams params;
    GustTrack coarse(params, 0.1, 77);
    GustTrack fine(params, 0.1, 77);
    // The same grid seen through different query spacings agrees at shared times.
    std::vector<WindVector> at_half;
    for (int k = 0; k <= 200; ++k) at_half.push_back(coarse.at(0.5 * k));
    for (int k = 0; k <= 400; ++k) {
        const auto w = fine.at(0.25 * k);
        if (k % 2 == 0) {
            CHECK_THAT(w.east, WithinAbs(at_half[k / 2].east, 1e-12));
            CHECK_THAT(w.north, WithinAbs(at_half[k / 2].north, 1e-12));
        }
    }
    CHECK_THROWS_AS(fine.at(1.0), Error);
}

TEST_CASE("ISA troposphere density", "[atmosphere][isa]") {
    CHECK(air_density(0.0) == 1.225);
    // ISA tables give 0.3639 kg/m^3 at 11 km.
    CHECK_THAT(air_density(11000.0), WithinAbs(0.36389479050615, 1e-12));
    CHECK_THAT(air_density(11000.0), WithinAbs(0.3639, 5e-4));
    double previous = air_density(0.0);
    for (int h = 100; h <= 11000; h += 100) {
        CHECK(air_density(h) < previous);
        previous = air_density(h);
    }
    CHECK_THROWS_AS(air_density(11001.0), Error);
    CHECK_THROWS_AS(air_density(-1.0), Error);
}
