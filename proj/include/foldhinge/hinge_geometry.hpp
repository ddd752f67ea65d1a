#pragma once

// Geometric self-folding model of the FR4 / polyolefin / polyimide laminate
// hinge. The shrunk polyolefin pulls the two board edges together until they
// touch, so the hinge bends on a circular arc of radius t_FR4 + t_PO and the
// designed board gap sets the fold angle.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "foldhinge/error.hpp"
#include "foldhinge/units.hpp"

namespace foldhinge::geometry {

// Process constants of the one-time heat-shrink step; documentation only.
inline constexpr double shrink_temperature_c = 110.0;
inline constexpr double shrink_duration_s = 90.0;

struct LaminateSpec {
    double t_fr4_mm = 0.55;        // measured board thickness
    double t_po_shrunk_mm = 0.44;  // polyolefin after shrinkage
    double t_po_flat_mm = 0.35;    // polyolefin sheet as laminated
    double gap_mm = 0.0;

    void validate() const {
        if (!(t_fr4_mm > 0.0) || !(t_po_shrunk_mm > 0.0) || !(t_po_flat_mm > 0.0)) {
            fail(ErrorKind::InvalidArgument, "laminate thicknesses must be strictly positive");
        }
        if (!(gap_mm >= 0.0) || !std::isfinite(gap_mm)) {
            fail(ErrorKind::InvalidArgument, "board gap must be finite and non-negative");
        }
    }
};

inline LaminateSpec with_gap(LaminateSpec spec, double gap_mm) {
    spec.gap_mm = gap_mm;
    return spec;
}

/// Radius of the folded hinge arc in mm.
inline double curvature_radius(const LaminateSpec& spec) {
    spec.validate();
    return spec.t_fr4_mm + spec.t_po_shrunk_mm;
}

/// Predicted fold angle in radians. A prediction beyond a full fold (pi) is
/// physically impossible and reported, not clamped.
inline double fold_angle(const LaminateSpec& spec) {
    const double theta = spec.gap_mm / curvature_radius(spec);
    if (theta > pi) {
        fail(ErrorKind::InvalidGeometry,
             "gap " + std::to_string(spec.gap_mm) + " mm folds past pi for this laminate");
    }
    return theta;
}

inline double fold_angle_deg(const LaminateSpec& spec) { return rad_to_deg(fold_angle(spec)); }

/// Board gap (mm) that yields fold angle theta (radians). The gap field of
/// spec is ignored.
inline double gap_for_angle(double theta, const LaminateSpec& spec) {
    if (!(theta >= 0.0 && theta <= pi)) {
        fail(ErrorKind::OutOfRange, "target fold angle must lie in [0, pi] radians");
    }
    return theta * curvature_radius(with_gap(spec, 0.0));
}

struct AngleSample {
    double gap_mm;
    double angle_deg;
};

struct AngleMeasurementSet {
    std::vector<AngleSample> records;

    void validate() const {
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (!(r.gap_mm > 0.0)) {
                fail(ErrorKind::InvalidArgument,
                     "measurement " + std::to_string(i) + ": gap must be positive");
            }
            if (!(r.angle_deg > 0.0 && r.angle_deg < 180.0)) {
                fail(ErrorKind::InvalidArgument,
                     "measurement " + std::to_string(i) + ": angle must lie in (0, 180) degrees");
            }
        }
    }
};

struct GapResidual {
    double gap_mm;
    double predicted_deg;
    double mean_measured_deg;
    double mean_residual_deg;  // measured minus predicted
    std::size_t samples;
};

struct ValidationMetrics {
    double r_squared;
    double abs_error_std_deg;
    std::vector<GapResidual> residuals;
};

/// Agreement between measured fold angles and the gap model.
///
/// R^2 is 1 - SS_res / SS_tot over individual samples (not per-gap means).
/// abs_error_std_deg is the sample standard deviation of |measured - predicted|.
inline ValidationMetrics validation_metrics(const AngleMeasurementSet& data,
                                            const LaminateSpec& laminate) {
    data.validate();

    std::map<double, std::vector<double>> by_gap;
    for (const auto& r : data.records) {
        by_gap[r.gap_mm].push_back(r.angle_deg);
    }
    if (by_gap.size() < 2) {
        fail(ErrorKind::InsufficientData, "validation needs measurements at two or more distinct gaps");
    }

    const std::size_t n = data.records.size();
    double mean_measured = 0.0;
    for (const auto& r : data.records) mean_measured += r.angle_deg;
    mean_measured /= static_cast<double>(n);

    double ss_res = 0.0;
    double ss_tot = 0.0;
    std::vector<double> abs_errors;
    abs_errors.reserve(n);
    for (const auto& r : data.records) {
        const double predicted = fold_angle_deg(with_gap(laminate, r.gap_mm));
        const double residual = r.angle_deg - predicted;
        ss_res += residual * residual;
        ss_tot += (r.angle_deg - mean_measured) * (r.angle_deg - mean_measured);
        abs_errors.push_back(std::abs(residual));
    }

    double abs_mean = 0.0;
    for (double e : abs_errors) abs_mean += e;
    abs_mean /= static_cast<double>(n);
    double abs_var = 0.0;
    for (double e : abs_errors) abs_var += (e - abs_mean) * (e - abs_mean);
    abs_var = n > 1 ? abs_var / static_cast<double>(n - 1) : 0.0;

    ValidationMetrics metrics;
    if (ss_tot > 0.0) {
        metrics.r_squared = 1.0 - ss_res / ss_tot;
    } else {
        metrics.r_squared = ss_res == 0.0 ? 1.0 : 0.0;
    }
    metrics.abs_error_std_deg = std::sqrt(abs_var);

    for (const auto& [gap, angles] : by_gap) {
        const double predicted = fold_angle_deg(with_gap(laminate, gap));
        double mean = 0.0;
        for (double a : angles) mean += a;
        mean /= static_cast<double>(angles.size());
        metrics.residuals.push_back({gap, predicted, mean, mean - predicted, angles.size()});
    }
    return metrics;
}

}  // namespace foldhinge::geometry
