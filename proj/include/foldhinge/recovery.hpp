#pragma once

// Fold-angle recovery after release from flat stacking.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "foldhinge/error.hpp"

namespace foldhinge::recovery {

struct RecoverySample {
    double t_min;
    double angle_deg;
};

struct RecoveryTrace {
    double hold_duration_min = 0.0;
    double design_angle_deg = 0.0;
    std::vector<RecoverySample> samples;

    void validate() const {
        if (!(design_angle_deg > 0.0)) {
            fail(ErrorKind::InvalidArgument, "design angle must be positive");
        }
        if (!(hold_duration_min >= 0.0)) {
            fail(ErrorKind::InvalidArgument, "hold duration must be non-negative");
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (!(s.t_min >= 0.0)) {
                fail(ErrorKind::InvalidArgument, "sample " + std::to_string(i) + ": time must be non-negative");
            }
            if (i > 0 && !(s.t_min > samples[i - 1].t_min)) {
                fail(ErrorKind::InvalidArgument, "sample " + std::to_string(i) + ": times must strictly increase");
            }
            if (!(s.angle_deg > 0.0 && s.angle_deg < 180.0)) {
                fail(ErrorKind::InvalidArgument,
                     "sample " + std::to_string(i) + ": angle must lie in (0, 180) degrees");
            }
        }
    }
};

inline double recovery_rate(double angle_deg, double design_angle_deg) {
    if (!(design_angle_deg > 0.0)) {
        fail(ErrorKind::InvalidArgument, "design angle must be positive");
    }
    return angle_deg / design_angle_deg;
}

/// Piecewise-linear recovery rate at time t (minutes since release).
inline double rate_at(const RecoveryTrace& trace, double t_min) {
    trace.validate();
    const auto& s = trace.samples;
    if (s.empty()) {
        fail(ErrorKind::InsufficientData, "recovery trace has no samples");
    }
    if (!(t_min >= s.front().t_min && t_min <= s.back().t_min)) {
        fail(ErrorKind::OutOfRange, "time " + std::to_string(t_min) + " min lies outside the trace");
    }
    const auto upper = std::lower_bound(s.begin(), s.end(), t_min,
                                        [](const RecoverySample& a, double t) { return a.t_min < t; });
    if (upper->t_min == t_min) {
        return recovery_rate(upper->angle_deg, trace.design_angle_deg);
    }
    const auto lower = upper - 1;
    const double w = (t_min - lower->t_min) / (upper->t_min - lower->t_min);
    const double r0 = recovery_rate(lower->angle_deg, trace.design_angle_deg);
    const double r1 = recovery_rate(upper->angle_deg, trace.design_angle_deg);
    return r0 + w * (r1 - r0);
}

/// r(t) = r_inst + r_slow * (1 - exp(-t / tau)): an instantaneous elastic
/// step followed by a slow exponential approach.
struct TwoPhaseModel {
    double r_inst;
    double r_slow;
    double tau_min;

    double operator()(double t_min) const { return r_inst + r_slow * (1.0 - std::exp(-t_min / tau_min)); }
};

struct TwoPhaseFit {
    TwoPhaseModel model;
    double rmse;
    int iterations;
    bool exceeds_design;  // r_inst + r_slow > 1.05
};

// Parameter box for the fit.
inline constexpr double rate_min = 0.0;
inline constexpr double rate_max = 1.0;
inline constexpr double tau_min_bound = 1e-6;
inline constexpr double tau_max_bound = 1e4;
inline constexpr int max_fit_iterations = 500;

namespace detail {

// The third parameter is log(tau): steps in tau itself overshoot into the
// t >> tau plateau where the tau gradient vanishes.
inline Eigen::Vector3d clamp_to_box(Eigen::Vector3d p) {
    p[0] = std::clamp(p[0], rate_min, rate_max);
    p[1] = std::clamp(p[1], rate_min, rate_max);
    p[2] = std::clamp(p[2], std::log(tau_min_bound), std::log(tau_max_bound));
    return p;
}

inline double cost(const Eigen::Vector3d& p, const std::vector<double>& t, const std::vector<double>& r) {
    const TwoPhaseModel m{p[0], p[1], std::exp(p[2])};
    double c = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double e = m(t[i]) - r[i];
        c += e * e;
    }
    return c;
}

}  // namespace detail

/// Bounded Levenberg-Marquardt fit of the two-phase model.
///
/// Starts from r_inst = first rate, r_slow = last - first, tau = half the
/// trace span, and projects every trial step back into the parameter box.
inline TwoPhaseFit fit_two_phase(const RecoveryTrace& trace) {
    trace.validate();
    const auto& s = trace.samples;
    if (s.size() < 4) {
        fail(ErrorKind::InsufficientData, "two-phase fit needs at least 4 samples");
    }
    std::vector<double> t;
    std::vector<double> r;
    for (const auto& sample : s) {
        t.push_back(sample.t_min);
        r.push_back(recovery_rate(sample.angle_deg, trace.design_angle_deg));
    }

    Eigen::Vector3d p(r.front(), r.back() - r.front(), std::log(std::max(0.5 * (t.back() - t.front()), tau_min_bound)));
    p = detail::clamp_to_box(p);
    double c = detail::cost(p, t, r);
    double damping = 1e-3;
    int iteration = 0;
    bool converged = false;

    for (; iteration < max_fit_iterations; ++iteration) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double tau = std::exp(p[2]);
            const double decay = std::exp(-t[i] / tau);
            const Eigen::Vector3d grad(1.0, 1.0 - decay, -p[1] * t[i] * decay / tau);
            const double residual = r[i] - (p[0] + p[1] * (1.0 - decay));
            jtj += grad * grad.transpose();
            jtr += grad * residual;
        }
        if (jtr.cwiseAbs().maxCoeff() < 1e-15 || c < 1e-30) {
            converged = true;
            break;
        }

        bool accepted = false;
        while (damping < 1e12) {
            Eigen::Matrix3d a = jtj;
            for (int k = 0; k < 3; ++k) {
                a(k, k) += damping * std::max(jtj(k, k), 1e-12);
            }
            const Eigen::Vector3d trial = detail::clamp_to_box(p + a.ldlt().solve(jtr));
            const double trial_cost = detail::cost(trial, t, r);
            if (trial_cost < c) {
                const double step = (trial - p).cwiseAbs().cwiseQuotient(p.cwiseAbs().array().max(1e-12).matrix()).maxCoeff();
                const double gain = c - trial_cost;
                p = trial;
                c = trial_cost;
                damping = std::max(damping * 0.3, 1e-12);
                accepted = true;
                if (step < 1e-12 || gain <= 1e-15 * c) {
                    converged = true;
                }
                break;
            }
            damping *= 10.0;
        }
        if (!accepted) {
            // No descent direction left inside the box: at a (constrained) minimum.
            converged = true;
            break;
        }
        if (converged) {
            ++iteration;
            break;
        }
    }
    if (!converged) {
        fail(ErrorKind::NonConvergence, "two-phase recovery fit did not converge");
    }

    const TwoPhaseModel model{p[0], p[1], std::exp(p[2])};
    const double rmse = std::sqrt(c / static_cast<double>(t.size()));
    return {model, rmse, iteration, model.r_inst + model.r_slow > 1.05};
}

}  // namespace foldhinge::recovery
