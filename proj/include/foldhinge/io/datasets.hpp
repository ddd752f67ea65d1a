#pragma once

// File loaders for the measurement series consumed by the tools.

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "foldhinge/atmosphere.hpp"
#include "foldhinge/hinge_geometry.hpp"
#include "foldhinge/hinge_mechanics.hpp"
#include "foldhinge/io/csv.hpp"
#include "foldhinge/recovery.hpp"

namespace foldhinge::io {

namespace detail {

[[noreturn]] inline void bad_row(const std::string& path, const CsvRow& row, const std::string& msg) {
    fail(ErrorKind::MalformedInput, path + ":" + std::to_string(row.line) + ": " + msg);
}

}  // namespace detail

/// `gap_mm,angle_deg`
inline geometry::AngleMeasurementSet load_angle_measurements(const std::string& path) {
    const auto table = read_csv(path, {"gap_mm", "angle_deg"});
    geometry::AngleMeasurementSet data;
    for (const auto& row : table.rows) {
        const double gap = row.values[0];
        const double angle = row.values[1];
        if (!(gap > 0.0)) detail::bad_row(path, row, "gap must be positive");
        if (!(angle > 0.0 && angle < 180.0)) detail::bad_row(path, row, "angle must lie in (0, 180) degrees");
        data.records.push_back({gap, angle});
    }
    return data;
}

/// `displacement_mm,force_N[,cycle]`
inline mechanics::TensileDataset load_tensile_dataset(const std::string& path) {
    const auto table = read_csv(path, {"displacement_mm", "force_N"}, {"cycle"});
    const bool has_cycle = table.header.size() == 3;
    mechanics::TensileDataset data;
    for (const auto& row : table.rows) {
        mechanics::TensilePoint p{row.values[0], row.values[1], std::nullopt};
        if (!(p.displacement_mm >= 0.0)) detail::bad_row(path, row, "displacement must be non-negative");
        if (!std::isfinite(p.force_n)) detail::bad_row(path, row, "force must be finite");
        if (has_cycle) {
            const double c = row.values[2];
            if (c != std::floor(c) || c < 0.0) detail::bad_row(path, row, "cycle must be a non-negative integer");
            p.cycle = static_cast<int>(c);
        }
        const auto same_cycle = [&](const mechanics::TensilePoint& q) { return q.cycle == p.cycle; };
        for (auto it = data.points.rbegin(); it != data.points.rend(); ++it) {
            if (same_cycle(*it)) {
                if (!(p.displacement_mm > it->displacement_mm)) {
                    detail::bad_row(path, row, "displacement must strictly increase within a cycle");
                }
                break;
            }
        }
        data.points.push_back(p);
    }
    return data;
}

/// `t_min,angle_deg` plus a JSON sidecar with hold_duration_min and design_angle_deg.
inline recovery::RecoveryTrace load_recovery_trace(const std::string& csv_path, const std::string& sidecar_path) {
    recovery::RecoveryTrace trace;
    {
        std::ifstream in(sidecar_path);
        if (!in) fail(ErrorKind::MalformedInput, sidecar_path + ": cannot open file");
        nlohmann::json meta;
        try {
            meta = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorKind::MalformedInput, sidecar_path + ": " + e.what());
        }
        for (const char* key : {"hold_duration_min", "design_angle_deg"}) {
            if (!meta.is_object() || !meta.contains(key) || !meta[key].is_number()) {
                fail(ErrorKind::MalformedInput, sidecar_path + ": field '" + key + "' must be a number");
            }
        }
        trace.hold_duration_min = meta["hold_duration_min"].get<double>();
        trace.design_angle_deg = meta["design_angle_deg"].get<double>();
        if (!(trace.design_angle_deg > 0.0)) {
            fail(ErrorKind::MalformedInput, sidecar_path + ": field 'design_angle_deg' must be positive");
        }
        if (!(trace.hold_duration_min >= 0.0)) {
            fail(ErrorKind::MalformedInput, sidecar_path + ": field 'hold_duration_min' must be non-negative");
        }
    }
    const auto table = read_csv(csv_path, {"t_min", "angle_deg"});
    for (const auto& row : table.rows) {
        const double t = row.values[0];
        const double angle = row.values[1];
        if (!(t >= 0.0)) detail::bad_row(csv_path, row, "time must be non-negative");
        if (!trace.samples.empty() && !(t > trace.samples.back().t_min)) {
            detail::bad_row(csv_path, row, "time must strictly increase");
        }
        if (!(angle > 0.0 && angle < 180.0)) detail::bad_row(csv_path, row, "angle must lie in (0, 180) degrees");
        trace.samples.push_back({t, angle});
    }
    if (trace.samples.empty()) {
        fail(ErrorKind::MalformedInput, csv_path + ": trace has no samples");
    }
    return trace;
}

/// `alt_m,wind_east_mps,wind_north_mps`
inline atmosphere::WindProfile load_wind_profile(const std::string& path) {
    const auto table = read_csv(path, {"alt_m", "wind_east_mps", "wind_north_mps"});
    std::vector<atmosphere::WindNode> nodes;
    for (const auto& row : table.rows) {
        if (!nodes.empty() && !(row.values[0] > nodes.back().altitude_m)) {
            detail::bad_row(path, row, "altitudes must strictly increase");
        }
        nodes.push_back({row.values[0], row.values[1], row.values[2]});
    }
    if (nodes.empty()) {
        fail(ErrorKind::MalformedInput, path + ": wind profile has no nodes");
    }
    return atmosphere::WindProfile(std::move(nodes));
}

}  // namespace foldhinge::io
