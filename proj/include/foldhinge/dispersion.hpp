#pragma once

// Monte Carlo dispersion of kinematic gliders released from altitude.
//
// Each airframe flies at fixed airspeed and glide ratio; the left/right
// elevon fold-angle mismatch sets a constant turn rate. Ground velocity is
// the air-relative velocity plus the mean wind at the current altitude plus
// a Dryden gust. Integration is explicit Euler down to the floor altitude.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "foldhinge/atmosphere.hpp"
#include "foldhinge/error.hpp"
#include "foldhinge/random.hpp"
#include "foldhinge/units.hpp"

namespace foldhinge::dispersion {

using atmosphere::DrydenParams;
using atmosphere::WindProfile;
using atmosphere::WindVector;

struct GliderParams {
    double airspeed_mps = 10.0;
    double glide_ratio = 10.0;
    double elevon_delta_deg = 0.0;         // right minus left fold-angle deviation
    double turn_gain_dps_per_deg = 1.5;    // turn rate per degree of asymmetry
    double initial_heading_rad = 0.0;      // clockwise from north

    void validate() const {
        if (!(airspeed_mps > 0.0)) fail(ErrorKind::InvalidArgument, "glider airspeed must be positive");
        if (!(glide_ratio > 0.0)) fail(ErrorKind::InvalidArgument, "glide ratio must be positive");
        if (!(turn_gain_dps_per_deg >= 0.0)) fail(ErrorKind::InvalidArgument, "turn gain must be non-negative");
        if (!std::isfinite(elevon_delta_deg) || !std::isfinite(initial_heading_rad)) {
            fail(ErrorKind::InvalidArgument, "elevon delta and heading must be finite");
        }
    }
};

/// Turn rate in degrees per second; positive turns clockwise (to the right).
inline double turn_rate(const GliderParams& glider) {
    return glider.turn_gain_dps_per_deg * glider.elevon_delta_deg;
}

struct GliderState {
    double t_s = 0.0;
    double x_east_m = 0.0;
    double y_north_m = 0.0;
    double altitude_m = 0.0;
    double heading_rad = 0.0;

    bool operator==(const GliderState&) const = default;
};

/// Wind seen by one step: mean profile plus the gust at the step start.
struct WindEnvironment {
    const WindProfile& profile;
    WindVector gust{};
    bool density_scaled_airspeed = false;
};

/// True airspeed; optionally scaled so the indicated airspeed stays constant.
inline double true_airspeed(const GliderParams& glider, double altitude_m, bool density_scaled) {
    if (!density_scaled) return glider.airspeed_mps;
    return glider.airspeed_mps *
           std::sqrt(atmosphere::sea_level_density / atmosphere::air_density(altitude_m));
}

/// One explicit Euler step. All rates are evaluated at the step start.
inline GliderState step(const GliderState& state, const GliderParams& glider,
                        const WindEnvironment& env, double dt_s) {
    const double airspeed = true_airspeed(glider, state.altitude_m, env.density_scaled_airspeed);
    const WindVector wind = atmosphere::mean_wind(env.profile, state.altitude_m) + env.gust;
    const double ve = airspeed * std::sin(state.heading_rad) + wind.east;
    const double vn = airspeed * std::cos(state.heading_rad) + wind.north;
    const double sink = airspeed / glider.glide_ratio;

    GliderState next = state;
    next.t_s += dt_s;
    next.x_east_m += ve * dt_s;
    next.y_north_m += vn * dt_s;
    next.altitude_m -= sink * dt_s;
    next.heading_rad += deg_to_rad(turn_rate(glider)) * dt_s;
    return next;
}

struct SimConfig {
    double release_altitude_m = 10000.0;
    double floor_altitude_m = 5000.0;
    double dt_s = 0.5;
    std::size_t n_airframes = 50;
    double elevon_sigma_deg = 4.0;
    std::uint64_t seed = 1;
    WindProfile wind = WindProfile::calm();
    DrydenParams dryden{};
    double gust_dt_s = 0.1;  // turbulence grid step, independent of dt_s
    GliderParams glider{};
    std::size_t max_steps = 10'000'000;
    bool density_scaled_airspeed = false;
    unsigned threads = 1;

    void validate() const {
        if (!(release_altitude_m > floor_altitude_m) || !(floor_altitude_m >= 0.0)) {
            fail(ErrorKind::InvalidArgument, "release altitude must exceed a non-negative floor altitude");
        }
        if (!(dt_s > 0.0)) fail(ErrorKind::InvalidArgument, "integration step must be positive");
        if (n_airframes < 1) fail(ErrorKind::InvalidArgument, "ensemble needs at least one airframe");
        if (!(elevon_sigma_deg >= 0.0)) fail(ErrorKind::InvalidArgument, "elevon sigma must be non-negative");
        if (max_steps < 1) fail(ErrorKind::InvalidArgument, "step budget must be positive");
        if (density_scaled_airspeed && release_altitude_m > atmosphere::troposphere_top_m) {
            fail(ErrorKind::InvalidArgument, "density-scaled airspeed needs release altitude within the troposphere");
        }
        wind.validate();
        dryden.validate();
        atmosphere::check_step_ratio(dryden, gust_dt_s);
        glider.validate();
    }
};

struct LandingPoint {
    double x_east_m;
    double y_north_m;
};

struct Trajectory {
    std::vector<GliderState> samples;
    LandingPoint landing{};
    double hang_time_s = 0.0;
    double elevon_delta_deg = 0.0;
};

inline constexpr std::size_t hard_step_cap = 10'000'000;

/// Integrates one glider from release to the floor. The last sample is
/// interpolated to lie exactly on the floor altitude.
inline Trajectory simulate_trajectory(const GliderParams& glider, const SimConfig& config,
                                      std::uint64_t gust_seed) {
    glider.validate();
    const std::size_t budget = std::min(config.max_steps, hard_step_cap);

    atmosphere::GustTrack gusts(config.dryden, config.gust_dt_s, gust_seed);
    Trajectory trajectory;
    trajectory.elevon_delta_deg = glider.elevon_delta_deg;
    GliderState state{0.0, 0.0, 0.0, config.release_altitude_m, glider.initial_heading_rad};
    trajectory.samples.push_back(state);

    for (std::size_t k = 0;; ++k) {
        if (k >= budget) {
            fail(ErrorKind::StepBudgetExceeded,
                 "trajectory did not reach the floor within " + std::to_string(budget) + " steps");
        }
        const WindEnvironment env{config.wind, gusts.at(state.t_s), config.density_scaled_airspeed};
        GliderState next = step(state, glider, env, config.dt_s);
        if (next.altitude_m <= config.floor_altitude_m) {
            const double f = (state.altitude_m - config.floor_altitude_m) / (state.altitude_m - next.altitude_m);
            GliderState floor = state;
            floor.t_s = state.t_s + f * (next.t_s - state.t_s);
            floor.x_east_m = state.x_east_m + f * (next.x_east_m - state.x_east_m);
            floor.y_north_m = state.y_north_m + f * (next.y_north_m - state.y_north_m);
            floor.heading_rad = state.heading_rad + f * (next.heading_rad - state.heading_rad);
            floor.altitude_m = config.floor_altitude_m;
            // A crossing exactly at the previous sample would duplicate it.
            if (f > 0.0) trajectory.samples.push_back(floor);
            trajectory.landing = {floor.x_east_m, floor.y_north_m};
            trajectory.hang_time_s = floor.t_s;
            return trajectory;
        }
        trajectory.samples.push_back(next);
        state = next;
    }
}

/// Largest pairwise distance among landing points.
inline double dispersion_diameter(const std::vector<LandingPoint>& landings) {
    if (landings.empty()) {
        fail(ErrorKind::InsufficientData, "dispersion diameter needs at least one landing");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < landings.size(); ++i) {
        for (std::size_t j = i + 1; j < landings.size(); ++j) {
            best = std::max(best, std::hypot(landings[i].x_east_m - landings[j].x_east_m,
                                             landings[i].y_north_m - landings[j].y_north_m));
        }
    }
    return best;
}

struct HangTimeStats {
    double min_s;
    double mean_s;
    double max_s;
};

struct EnsembleResult {
    std::vector<Trajectory> trajectories;
    std::vector<LandingPoint> landings;
    double dispersion_diameter_m = 0.0;
    HangTimeStats hang_time{};
};

/// Elevon asymmetry of airframe `index`: each side deviates by an
/// independent N(0, sigma) draw from the airframe's own substream.
inline double sample_elevon_delta(const SimConfig& config, std::size_t index) {
    rng::NormalStream stream(rng::derive_seed(config.seed, index, rng::Purpose::Elevon));
    const double left = stream.normal(0.0, config.elevon_sigma_deg);
    const double right = stream.normal(0.0, config.elevon_sigma_deg);
    return right - left;
}

inline Trajectory simulate_airframe(const SimConfig& config, std::size_t index) {
    GliderParams glider = config.glider;
    glider.elevon_delta_deg = sample_elevon_delta(config, index);
    return simulate_trajectory(glider, config, rng::derive_seed(config.seed, index, rng::Purpose::Gust));
}

/// Simulates every airframe of the ensemble. Airframe i depends only on
/// (seed, i), so the result is identical for any thread count.
inline EnsembleResult run_ensemble(const SimConfig& config) {
    config.validate();
    const std::size_t n = config.n_airframes;
    EnsembleResult result;
    result.trajectories.resize(n);
    std::vector<std::exception_ptr> errors(n);

    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                result.trajectories[i] = simulate_airframe(config, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    double total = 0.0;
    result.hang_time = {std::numeric_limits<double>::infinity(), 0.0, -std::numeric_limits<double>::infinity()};
    for (const auto& t : result.trajectories) {
        result.landings.push_back(t.landing);
        result.hang_time.min_s = std::min(result.hang_time.min_s, t.hang_time_s);
        result.hang_time.max_s = std::max(result.hang_time.max_s, t.hang_time_s);
        total += t.hang_time_s;
    }
    result.hang_time.mean_s = total / static_cast<double>(n);
    result.dispersion_diameter_m = dispersion_diameter(result.landings);
    return result;
}

}  // namespace foldhinge::dispersion
