#pragma once

// Flight environment: tabulated mean wind, first-order Dryden gusts on the
// two horizontal components, and the ISA troposphere density.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "foldhinge/error.hpp"
#include "foldhinge/random.hpp"

namespace foldhinge::atmosphere {

struct WindVector {
    double east = 0.0;
    double north = 0.0;

    WindVector operator+(const WindVector& o) const { return {east + o.east, north + o.north}; }
    bool operator==(const WindVector&) const = default;
};

struct WindNode {
    double altitude_m;
    double east_mps;
    double north_mps;
};

class WindProfile {
public:
    WindProfile() = default;
    explicit WindProfile(std::vector<WindNode> nodes) : nodes_(std::move(nodes)) { validate(); }

    static WindProfile calm() { return WindProfile({{0.0, 0.0, 0.0}}); }
    static WindProfile uniform(WindVector w) { return WindProfile({{0.0, w.east, w.north}}); }

    const std::vector<WindNode>& nodes() const { return nodes_; }
    bool empty() const { return nodes_.empty(); }

    void validate() const {
        if (nodes_.empty()) {
            fail(ErrorKind::InvalidArgument, "wind profile needs at least one node");
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const auto& n = nodes_[i];
            if (!std::isfinite(n.altitude_m) || !std::isfinite(n.east_mps) || !std::isfinite(n.north_mps)) {
                fail(ErrorKind::InvalidArgument, "wind node " + std::to_string(i) + " is not finite");
            }
            if (i > 0 && !(n.altitude_m > nodes_[i - 1].altitude_m)) {
                fail(ErrorKind::InvalidArgument, "wind profile altitudes must strictly increase");
            }
        }
    }

private:
    std::vector<WindNode> nodes_;
};

/// Mean horizontal wind at altitude; linear between nodes, held constant
/// beyond the first and last node.
inline WindVector mean_wind(const WindProfile& profile, double altitude_m) {
    const auto& nodes = profile.nodes();
    if (nodes.empty()) {
        fail(ErrorKind::InvalidArgument, "wind profile is empty");
    }
    if (altitude_m <= nodes.front().altitude_m) {
        return {nodes.front().east_mps, nodes.front().north_mps};
    }
    if (altitude_m >= nodes.back().altitude_m) {
        return {nodes.back().east_mps, nodes.back().north_mps};
    }
    const auto upper = std::upper_bound(nodes.begin(), nodes.end(), altitude_m,
                                        [](double h, const WindNode& n) { return h < n.altitude_m; });
    const auto lower = upper - 1;
    const double w = (altitude_m - lower->altitude_m) / (upper->altitude_m - lower->altitude_m);
    return {lower->east_mps + w * (upper->east_mps - lower->east_mps),
            lower->north_mps + w * (upper->north_mps - lower->north_mps)};
}

struct DrydenParams {
    double sigma_u_mps = 1.5;
    double sigma_v_mps = 1.5;
    double length_u_m = 533.0;
    double length_v_m = 533.0;
    double airspeed_mps = 10.0;

    void validate() const {
        if (!(sigma_u_mps >= 0.0) || !(sigma_v_mps >= 0.0)) {
            fail(ErrorKind::InvalidArgument, "turbulence intensities must be non-negative");
        }
        if (!(length_u_m > 0.0) || !(length_v_m > 0.0)) {
            fail(ErrorKind::InvalidArgument, "turbulence scale lengths must be positive");
        }
        if (!(airspeed_mps > 0.0)) {
            fail(ErrorKind::InvalidArgument, "turbulence reference airspeed must be positive");
        }
    }

    static DrydenParams calm() { return {0.0, 0.0, 533.0, 533.0, 10.0}; }
};

struct GustState {
    double u_mps = 0.0;
    double v_mps = 0.0;
    rng::NormalStream stream;

    /// Gusts starting at rest.
    static GustState at_rest(std::uint64_t seed) { return {0.0, 0.0, rng::NormalStream(seed)}; }

    /// Gusts starting from a draw of the stationary distribution N(0, sigma^2).
    static GustState stationary(const DrydenParams& params, std::uint64_t seed) {
        GustState state = at_rest(seed);
        state.u_mps = params.sigma_u_mps * state.stream.normal();
        state.v_mps = params.sigma_v_mps * state.stream.normal();
        return state;
    }

    WindVector as_wind() const { return {u_mps, v_mps}; }
};

inline void check_step_ratio(const DrydenParams& params, double dt_s) {
    if (!(dt_s > 0.0)) {
        fail(ErrorKind::InvalidArgument, "gust time step must be positive");
    }
    if (!(params.airspeed_mps * dt_s / params.length_u_m < 1.0 &&
          params.airspeed_mps * dt_s / params.length_v_m < 1.0)) {
        fail(ErrorKind::InvalidArgument, "unstable gust step: V*dt/L must be below 1");
    }
}

/// Advances state in place by one Dryden filter step.
inline void advance_gust(GustState& state, const DrydenParams& params, double dt_s) {
    check_step_ratio(params, dt_s);
    const double a_u = params.airspeed_mps * dt_s / params.length_u_m;
    const double a_v = params.airspeed_mps * dt_s / params.length_v_m;
    const double eta_u = state.stream.normal();
    const double eta_v = state.stream.normal();
    state.u_mps = (1.0 - a_u) * state.u_mps + params.sigma_u_mps * std::sqrt(2.0 * a_u) * eta_u;
    state.v_mps = (1.0 - a_v) * state.v_mps + params.sigma_v_mps * std::sqrt(2.0 * a_v) * eta_v;
}

/// One step of the discrete Dryden filter,
///   g' = (1 - V dt / L) g + sigma sqrt(2 V dt / L) eta,
/// an exponentially correlated process with time constant L / V. Requires
/// V dt / L < 1; smaller ratios track the continuous process more closely.
inline GustState dryden_step(GustState state, const DrydenParams& params, double dt_s) {
    advance_gust(state, params, dt_s);
    return state;
}

/// Gust realisation on a fixed time grid, queried by linear interpolation.
///
/// The grid step is independent of whatever integrator consumes the track,
/// so a trajectory integrated at two different step sizes sees the same
/// turbulence. Queries must be non-decreasing in time. The u component is
/// applied eastward and v northward.
class GustTrack {
public:
    GustTrack(const DrydenParams& params, double grid_dt_s, std::uint64_t seed)
        : params_(params), dt_(grid_dt_s), state_(GustState::stationary(params, seed)) {
        params_.validate();
        check_step_ratio(params_, dt_);
        current_ = state_.as_wind();
        advance_gust(state_, params_, dt_);
        next_ = state_.as_wind();
    }

    WindVector at(double t_s) {
        if (t_s < time_of(index_)) {
            fail(ErrorKind::InvalidArgument, "gust track queried backwards in time");
        }
        while (time_of(index_ + 1) < t_s) {
            current_ = next_;
            advance_gust(state_, params_, dt_);
            next_ = state_.as_wind();
            ++index_;
        }
        const double w = (t_s - time_of(index_)) / dt_;
        if (w == 0.0) {
            return current_;
        }
        return {current_.east + w * (next_.east - current_.east),
                current_.north + w * (next_.north - current_.north)};
    }

private:
    double time_of(std::size_t k) const { return static_cast<double>(k) * dt_; }

    DrydenParams params_;
    double dt_;
    GustState state_;  // one grid step ahead of current_
    WindVector current_;
    WindVector next_;
    std::size_t index_ = 0;
};

inline constexpr double sea_level_density = 1.225;     // kg/m^3
inline constexpr double troposphere_top_m = 11000.0;

/// ISA troposphere density (kg/m^3).
inline double air_density(double altitude_m) {
    if (!(altitude_m >= 0.0)) {
        fail(ErrorKind::OutOfRange, "altitude must be non-negative for the ISA model");
    }
    if (altitude_m > troposphere_top_m) {
        fail(ErrorKind::OutOfRange, "altitude above the 11 km troposphere layer is not modelled");
    }
    return sea_level_density * std::pow(1.0 - 0.0065 * altitude_m / 288.15, 4.2561);
}

}  // namespace foldhinge::atmosphere
