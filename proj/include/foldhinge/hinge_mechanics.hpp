#pragma once

// Neo-Hookean bending model of the elastic polyolefin hinge.
//
// The polyimide face is inextensible, so the hinge section bends about it
// into an arc of curvature phi = theta / g. Incompressibility maps the flat
// thickness coordinate Y onto the bent coordinate y, and the fibre stretch is
// lambda = 1 - y phi = sqrt(1 - 2 Y phi). Unfolding from the fabricated angle
// theta0 to theta1 loads each fibre by the relative stretch lambda1 / lambda0.
//
// Units: lengths in mm, moduli in MPa (N/mm^2), moments in N*mm, forces in N.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "foldhinge/error.hpp"
#include "foldhinge/quadrature.hpp"
#include "foldhinge/units.hpp"

namespace foldhinge::mechanics {

struct HingeMechSpec {
    double arm_length_mm = 0.0;  // substrate length per side, L
    double width_mm = 0.0;       // hinge width, W
    double t_flat_mm = 0.35;
    double gap_mm = 1.0;
    double theta0_rad = deg_to_rad(51.0);
    double shear_modulus_mpa = shear_from_youngs(21.0);

    void validate() const {
        if (!(arm_length_mm > 0.0) || !(width_mm > 0.0) || !(t_flat_mm > 0.0) ||
            !(gap_mm > 0.0) || !(shear_modulus_mpa > 0.0)) {
            fail(ErrorKind::InvalidArgument,
                 "hinge arm length, width, flat thickness, gap and shear modulus must be positive");
        }
        if (!(theta0_rad > 0.0 && theta0_rad < pi)) {
            fail(ErrorKind::InvalidArgument, "initial fold angle must lie in (0, pi)");
        }
    }

    double alpha0() const { return pi - theta0_rad; }
};

inline HingeMechSpec with_shear_modulus(HingeMechSpec spec, double g_mpa) {
    spec.shear_modulus_mpa = g_mpa;
    return spec;
}

/// Largest tester displacement: the hinge is pulled fully flat (alpha = pi).
inline double max_displacement(const HingeMechSpec& spec) {
    spec.validate();
    return 2.0 * spec.arm_length_mm * (1.0 - std::sin(0.5 * spec.alpha0()));
}

/// Tester displacement that opens the internal angle from alpha0 to alpha.
inline double displacement_from_angle(double alpha, const HingeMechSpec& spec) {
    spec.validate();
    const double alpha0 = spec.alpha0();
    if (!(alpha >= alpha0 && alpha <= pi)) {
        fail(ErrorKind::OutOfRange, "internal angle must lie in [alpha0, pi]");
    }
    return 2.0 * spec.arm_length_mm * (std::sin(0.5 * alpha) - std::sin(0.5 * alpha0));
}

/// Internal angle alpha (radians) after unfolding by displacement d.
inline double internal_angle(double d_mm, const HingeMechSpec& spec) {
    spec.validate();
    if (!(d_mm >= 0.0)) {
        fail(ErrorKind::OutOfRange, "displacement must be non-negative");
    }
    double arg = d_mm / (2.0 * spec.arm_length_mm) + std::sin(0.5 * spec.alpha0());
    if (arg > 1.0) {
        // Rounding at the fully-open endpoint lands a few ulps above 1.
        if (arg - 1.0 > 8.0 * std::numeric_limits<double>::epsilon()) {
            fail(ErrorKind::OutOfRange,
                 "displacement " + std::to_string(d_mm) + " mm exceeds the fully-open limit");
        }
        arg = 1.0;
    }
    return 2.0 * std::asin(arg);
}

/// Bending curvature (1/mm) of a hinge of gap g folded to theta.
inline double curvature(double theta_rad, double gap_mm) {
    if (!(gap_mm > 0.0)) {
        fail(ErrorKind::InvalidArgument, "gap must be positive");
    }
    return theta_rad / gap_mm;
}

namespace detail {

inline void check_sqrt_domain(double y_flat_mm, double phi) {
    if (!(1.0 - 2.0 * y_flat_mm * phi > 0.0)) {
        fail(ErrorKind::DomainError, "2*Y*phi must stay below 1 (fibre stretch would vanish)");
    }
}

}  // namespace detail

/// Fibre stretch relative to the flat state at flat coordinate Y.
inline double stretch(double y_flat_mm, double phi) {
    detail::check_sqrt_domain(y_flat_mm, phi);
    return std::sqrt(1.0 - 2.0 * y_flat_mm * phi);
}

/// Bent coordinate y of the fibre at flat coordinate Y.
///
/// (1 - sqrt(1 - 2 Y phi)) / phi is evaluated in its rationalised form
/// 2 Y / (1 + sqrt(1 - 2 Y phi)), which is exact and reduces to Y at phi = 0.
inline double thickness_map(double y_flat_mm, double phi) {
    return 2.0 * y_flat_mm / (1.0 + stretch(y_flat_mm, phi));
}

/// Integrand of the bending moment per unit G*W, at flat coordinate Y.
inline double moment_integrand(double y_flat_mm, double phi0, double phi1) {
    const double lambda0 = stretch(y_flat_mm, phi0);
    const double lambda1 = stretch(y_flat_mm, phi1);
    const double lambda_eff = lambda1 / lambda0;
    const double stress_per_g = lambda_eff - 1.0 / (lambda_eff * lambda_eff);
    return stress_per_g * thickness_map(y_flat_mm, phi1) / lambda1;
}

inline void check_curvature_validity(double theta, const HingeMechSpec& spec) {
    const double phi = curvature(theta, spec.gap_mm);
    if (!(2.0 * spec.t_flat_mm * phi < 1.0)) {
        fail(ErrorKind::DomainError,
             "curvature too large: 2*t_flat*theta/g must be below 1 (theta = " +
                 std::to_string(theta) + " rad)");
    }
}

inline const quadrature::Tolerance& moment_tolerance() {
    static const quadrature::Tolerance tol{1e-10, 1e-8, 4000};
    return tol;
}

/// Restoring moment (N*mm) when the hinge is unfolded from theta0 to theta1.
/// Only unfolding (0 < theta1 <= theta0) is defined.
inline double bending_moment(double theta0, double theta1, const HingeMechSpec& spec) {
    spec.validate();
    if (!(theta0 > 0.0 && theta0 < pi)) {
        fail(ErrorKind::OutOfRange, "theta0 must lie in (0, pi)");
    }
    if (!(theta1 >= 0.0 && theta1 <= theta0)) {
        fail(ErrorKind::OutOfRange, "theta1 must lie in [0, theta0]; further folding is not modelled");
    }
    check_curvature_validity(theta0, spec);
    if (theta1 == theta0) {
        return 0.0;
    }
    const double phi0 = curvature(theta0, spec.gap_mm);
    const double phi1 = curvature(theta1, spec.gap_mm);
    const auto result = quadrature::integrate(
        [&](double y) { return moment_integrand(y, phi0, phi1); }, 0.0, spec.t_flat_mm,
        moment_tolerance());
    return spec.shear_modulus_mpa * spec.width_mm * result.value;
}

/// Tester force (N) at displacement d.
inline double tensile_force(double d_mm, const HingeMechSpec& spec) {
    if (d_mm == 0.0) {
        spec.validate();
        check_curvature_validity(spec.theta0_rad, spec);
        return 0.0;
    }
    const double alpha = internal_angle(d_mm, spec);
    const double lever = spec.arm_length_mm * std::cos(0.5 * alpha);
    if (!(lever > 1e-9 * spec.arm_length_mm)) {
        fail(ErrorKind::SingularConfiguration,
             "hinge is fully open at d = " + std::to_string(d_mm) + " mm; force diverges");
    }
    const double theta1 = std::max(0.0, std::min(spec.theta0_rad, pi - alpha));
    return bending_moment(spec.theta0_rad, theta1, spec) / lever;
}

struct ForcePoint {
    double displacement_mm;
    double force_n;
};

inline std::vector<ForcePoint> force_curve(std::span<const double> d_grid, const HingeMechSpec& spec) {
    std::vector<ForcePoint> curve;
    curve.reserve(d_grid.size());
    for (double d : d_grid) {
        curve.push_back({d, tensile_force(d, spec)});
    }
    return curve;
}

/// n evenly spaced displacements on [start, stop] (inclusive when n > 1).
inline std::vector<double> linspace(double start, double stop, std::size_t n) {
    std::vector<double> grid;
    grid.reserve(n);
    if (n == 1) {
        grid.push_back(start);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            grid.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
    }
    return grid;
}

struct TensilePoint {
    double displacement_mm;
    double force_n;
    std::optional<int> cycle;
};

struct TensileDataset {
    std::vector<TensilePoint> points;

    /// Points of one loading cycle, or all points when no cycle column exists.
    TensileDataset select_cycle(std::optional<int> cycle) const {
        if (!cycle) return *this;
        TensileDataset out;
        for (const auto& p : points) {
            if (p.cycle == cycle) out.points.push_back(p);
        }
        return out;
    }

    std::optional<int> first_cycle() const {
        std::optional<int> first;
        for (const auto& p : points) {
            if (p.cycle && (!first || *p.cycle < *first)) first = p.cycle;
        }
        return first;
    }
};

struct ModulusFit {
    double youngs_modulus_mpa;
    double shear_modulus_mpa;
    double r_squared;
    double residual_norm;  // sqrt of the residual sum of squares, N
};

/// Least-squares shear modulus for one loading cycle.
///
/// Force is proportional to G, so with f_i the model force at G = 1 the
/// optimum is G = sum(F_i f_i) / sum(f_i^2). The shear modulus in spec is
/// ignored. When the dataset carries cycle indices only the lowest-numbered
/// cycle is fitted.
inline ModulusFit fit_modulus(const TensileDataset& dataset, const HingeMechSpec& spec) {
    const TensileDataset data = dataset.select_cycle(dataset.first_cycle());
    if (data.points.size() < 3) {
        fail(ErrorKind::InsufficientData, "modulus fit needs at least 3 load-displacement points");
    }
    const HingeMechSpec unit = with_shear_modulus(spec, 1.0);
    const double d_max = max_displacement(unit);

    std::vector<double> unit_forces;
    unit_forces.reserve(data.points.size());
    double previous = -1.0;
    for (const auto& p : data.points) {
        if (!(p.displacement_mm >= 0.0 && p.displacement_mm < d_max)) {
            fail(ErrorKind::OutOfRange, "displacement " + std::to_string(p.displacement_mm) +
                                            " mm is outside [0, " + std::to_string(d_max) + ")");
        }
        if (!(p.displacement_mm > previous)) {
            fail(ErrorKind::InvalidArgument, "displacements must be strictly increasing within a cycle");
        }
        previous = p.displacement_mm;
        unit_forces.push_back(tensile_force(p.displacement_mm, unit));
    }

    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < unit_forces.size(); ++i) {
        num += data.points[i].force_n * unit_forces[i];
        den += unit_forces[i] * unit_forces[i];
    }
    if (!(den > 0.0)) {
        fail(ErrorKind::DegenerateModel, "model force is zero at every data point");
    }
    const double g = num / den;

    double mean = 0.0;
    for (const auto& p : data.points) mean += p.force_n;
    mean /= static_cast<double>(data.points.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < unit_forces.size(); ++i) {
        const double r = data.points[i].force_n - g * unit_forces[i];
        ss_res += r * r;
        ss_tot += (data.points[i].force_n - mean) * (data.points[i].force_n - mean);
    }
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return {youngs_from_shear(g), g, r2, std::sqrt(ss_res)};
}

}  // namespace foldhinge::mechanics
