#pragma once

// Command-line front end. run_cli is the whole program; main() only forwards
// to it, which lets the tests drive every subcommand in-process.
//
// Exit codes: 0 success, 1 unexpected internal error, 2 invalid flags or
// config, 3 fold angle beyond pi, 4 malformed input file, 5 fit failure,
// 6 step budget exceeded.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foldhinge/dispersion.hpp"
#include "foldhinge/error.hpp"
#include "foldhinge/hinge_geometry.hpp"
#include "foldhinge/hinge_mechanics.hpp"
#include "foldhinge/io/csv.hpp"
#include "foldhinge/io/datasets.hpp"
#include "foldhinge/io/sim_config.hpp"
#include "foldhinge/recovery.hpp"
#include "foldhinge/units.hpp"

#ifndef FOLDHINGE_VERSION
#define FOLDHINGE_VERSION "0.0.0"
#endif

namespace foldhinge::cli {

inline constexpr const char* version = FOLDHINGE_VERSION;

enum ExitCode : int {
    ok = 0,
    internal_error = 1,
    usage_error = 2,
    geometry_error = 3,
    malformed_input = 4,
    fit_failure = 5,
    step_budget = 6,
};

/// Failure raised by a command with its exit code already decided.
class CommandError : public std::runtime_error {
public:
    CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

namespace detail {

using nlohmann::json;
namespace fs = std::filesystem;

inline void ensure_writable(const fs::path& path, bool force) {
    if (fs::exists(path) && !force) {
        throw CommandError(usage_error, path.string() + ": output exists (pass --force to overwrite)");
    }
}

inline void write_text(const fs::path& path, const std::string& text, bool force) {
    ensure_writable(path, force);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError(usage_error, path.string() + ": cannot open for writing");
    out << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Maps a library error onto the exit code of the command that raised it.
inline int exit_code_for(ErrorKind kind, int fit_code) {
    switch (kind) {
    case ErrorKind::InvalidGeometry: return geometry_error;
    case ErrorKind::MalformedInput: return malformed_input;
    case ErrorKind::StepBudgetExceeded: return step_budget;
    case ErrorKind::InsufficientData:
    case ErrorKind::DegenerateModel:
    case ErrorKind::NonConvergence: return fit_code;
    default: return usage_error;
    }
}

struct LaminateFlags {
    double t_fr4_mm = 0.55;
    double t_po_mm = 0.44;

    void add(CLI::App& app) {
        app.add_option("--t-fr4-mm", t_fr4_mm, "FR4 board thickness (mm)")->capture_default_str();
        app.add_option("--t-po-mm", t_po_mm, "shrunk polyolefin thickness (mm)")->capture_default_str();
    }

    geometry::LaminateSpec spec() const {
        geometry::LaminateSpec s;
        s.t_fr4_mm = t_fr4_mm;
        s.t_po_shrunk_mm = t_po_mm;
        return s;
    }
};

struct HingeFlags {
    double arm_length_mm = 0.0;
    double width_mm = 0.0;
    double t_flat_mm = 0.35;
    double gap_mm = 1.0;
    double theta0_deg = 51.0;

    void add(CLI::App& app) {
        app.add_option("--arm-length-mm", arm_length_mm, "substrate arm length per side, L (mm)")->required();
        app.add_option("--width-mm", width_mm, "hinge width, W (mm)")->required();
        app.add_option("--t-flat-mm", t_flat_mm, "flat polyolefin thickness (mm)")->capture_default_str();
        app.add_option("--gap-mm", gap_mm, "board gap (mm)")->capture_default_str();
        app.add_option("--theta0-deg", theta0_deg, "as-fabricated fold angle (deg)")->capture_default_str();
    }

    mechanics::HingeMechSpec spec(double shear_mpa) const {
        mechanics::HingeMechSpec s;
        s.arm_length_mm = arm_length_mm;
        s.width_mm = width_mm;
        s.t_flat_mm = t_flat_mm;
        s.gap_mm = gap_mm;
        s.theta0_rad = deg_to_rad(theta0_deg);
        s.shear_modulus_mpa = shear_mpa;
        return s;
    }
};

inline std::string curve_csv(const std::vector<mechanics::ForcePoint>& curve) {
    std::ostringstream out;
    io::CsvWriter w(out);
    w.header({"displacement_mm", "force_N"});
    for (const auto& p : curve) w.row({p.displacement_mm, p.force_n});
    return out.str();
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    using detail::json;
    namespace fs = std::filesystem;

    CLI::App app{"Design and simulation tools for elastic self-folding laminate hinges", "foldhinge"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    // design
    auto* design = app.add_subcommand("design", "fold angle for a gap, or the gap for a target angle");
    std::optional<double> design_gap;
    std::optional<double> design_angle;
    std::string design_json;
    bool design_force = false;
    detail::LaminateFlags design_laminate;
    auto* gap_opt = design->add_option("--gap-mm", design_gap, "board gap (mm)");
    auto* angle_opt = design->add_option("--angle-deg", design_angle, "target fold angle (deg)");
    gap_opt->excludes(angle_opt);
    design_laminate.add(*design);
    design->add_option("--json", design_json, "also write the result as JSON");
    design->add_flag("--force", design_force, "overwrite existing output files");

    // validate
    auto* validate = app.add_subcommand("validate", "compare measured fold angles with the gap model");
    std::string validate_data;
    std::string validate_json;
    bool validate_force = false;
    detail::LaminateFlags validate_laminate;
    validate->add_option("--data", validate_data, "CSV with header gap_mm,angle_deg")->required();
    validate_laminate.add(*validate);
    validate->add_option("--json", validate_json, "write metrics JSON here instead of stdout");
    validate->add_flag("--force", validate_force, "overwrite existing output files");

    // mechanics
    auto* mech = app.add_subcommand("mechanics", "hinge force-displacement model");
    mech->require_subcommand(1);
    auto* curve = mech->add_subcommand("curve", "write a model force-displacement curve");
    detail::HingeFlags curve_hinge;
    curve_hinge.add(*curve);
    std::optional<double> curve_e;
    std::optional<double> curve_g;
    double curve_d_min = 0.0;
    std::optional<double> curve_d_max;
    std::size_t curve_points = 100;
    std::string curve_out;
    bool curve_force = false;
    auto* e_opt = curve->add_option("--E-mpa", curve_e, "Young's modulus (MPa), default 21");
    auto* g_opt = curve->add_option("--G-mpa", curve_g, "shear modulus (MPa)");
    e_opt->excludes(g_opt);
    curve->add_option("--d-min", curve_d_min, "first displacement (mm)")->capture_default_str();
    curve->add_option("--d-max", curve_d_max, "last displacement (mm), default 0.9 of the fully-open limit");
    curve->add_option("--points", curve_points, "number of displacements")->capture_default_str();
    curve->add_option("--out", curve_out, "curve CSV path (default stdout)");
    curve->add_flag("--force", curve_force, "overwrite existing output files");

    auto* fit = mech->add_subcommand("fit", "fit the modulus to tensile-test data");
    detail::HingeFlags fit_hinge;
    fit_hinge.add(*fit);
    std::string fit_data;
    std::optional<int> fit_cycle;
    std::string fit_json;
    std::string fit_curve;
    std::size_t fit_curve_points = 100;
    bool fit_force = false;
    fit->add_option("--data", fit_data, "CSV with header displacement_mm,force_N[,cycle]")->required();
    fit->add_option("--cycle", fit_cycle, "cycle to fit (default: first cycle)");
    fit->add_option("--out-json", fit_json, "fit JSON path (default stdout)");
    fit->add_option("--out-curve", fit_curve, "fitted curve CSV path");
    fit->add_option("--curve-points", fit_curve_points, "points in the fitted curve")->capture_default_str();
    fit->add_flag("--force", fit_force, "overwrite existing output files");

    // recovery
    auto* rec = app.add_subcommand("recovery", "angle recovery after flat stacking");
    std::string rec_trace;
    std::string rec_meta;
    std::vector<double> rec_at;
    std::string rec_json;
    bool rec_force = false;
    rec->add_option("--trace", rec_trace, "CSV with header t_min,angle_deg")->required();
    rec->add_option("--meta", rec_meta, "JSON sidecar with hold_duration_min and design_angle_deg")->required();
    rec->add_option("--at", rec_at, "times (min) at which to report the recovery rate; default 30");
    rec->add_option("--json", rec_json, "write JSON here instead of stdout");
    rec->add_flag("--force", rec_force, "overwrite existing output files");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo glider dispersion");
    std::string sim_config;
    std::string sim_out_dir;
    std::optional<std::uint64_t> sim_seed;
    std::optional<unsigned> sim_threads;
    bool sim_force = false;
    bool sim_no_traj = false;
    bool sim_scatter = false;
    sim->add_option("--config", sim_config, "simulation JSON config or run manifest")->required();
    sim->add_option("--out-dir", sim_out_dir, "output directory")->required();
    sim->add_option("--seed", sim_seed, "override the config seed");
    sim->add_option("--threads", sim_threads, "worker threads (results do not depend on this)");
    sim->add_flag("--force", sim_force, "overwrite existing output files");
    sim->add_flag("--no-trajectories", sim_no_traj, "skip per-trajectory CSVs");
    sim->add_flag("--scatter", sim_scatter, "also write landings.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion& e) {
        out << version << "\n";
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return usage_error;
    }

    int fit_code = usage_error;
    try {
        if (design->parsed()) {
            if (!design_gap && !design_angle) {
                throw CommandError(usage_error, "design: give exactly one of --gap-mm or --angle-deg");
            }
            const auto laminate = design_laminate.spec();
            const double radius = geometry::curvature_radius(laminate);
            json result;
            if (design_gap) {
                if (!(*design_gap >= 0.0)) throw CommandError(usage_error, "design: --gap-mm must be non-negative");
                const double theta = geometry::fold_angle(geometry::with_gap(laminate, *design_gap));
                out << "fold angle: " << io::format_number(rad_to_deg(theta)) << " deg (gap "
                    << io::format_number(*design_gap) << " mm, radius " << io::format_number(radius) << " mm)\n";
                result = {{"mode", "angle_from_gap"},
                          {"gap_mm", *design_gap},
                          {"angle_deg", rad_to_deg(theta)},
                          {"angle_rad", theta},
                          {"radius_mm", radius}};
            } else {
                if (!(*design_angle >= 0.0)) throw CommandError(usage_error, "design: --angle-deg must be non-negative");
                if (*design_angle > 180.0) {
                    throw CommandError(geometry_error, "design: a fold angle above 180 deg cannot be built");
                }
                const double gap = geometry::gap_for_angle(deg_to_rad(*design_angle), laminate);
                out << "required gap: " << io::format_number(gap) << " mm (angle "
                    << io::format_number(*design_angle) << " deg, radius " << io::format_number(radius) << " mm)\n";
                result = {{"mode", "gap_from_angle"},
                          {"gap_mm", gap},
                          {"angle_deg", *design_angle},
                          {"angle_rad", deg_to_rad(*design_angle)},
                          {"radius_mm", radius}};
            }
            if (!design_json.empty()) detail::write_text(design_json, detail::dump(result), design_force);
        } else if (validate->parsed()) {
            fit_code = malformed_input;
            const auto data = io::load_angle_measurements(validate_data);
            if (data.records.empty()) throw CommandError(malformed_input, validate_data + ": no measurements");
            const auto m = geometry::validation_metrics(data, validate_laminate.spec());
            json residuals = json::array();
            for (const auto& r : m.residuals) {
                residuals.push_back({{"gap_mm", r.gap_mm},
                                     {"predicted_deg", r.predicted_deg},
                                     {"mean_measured_deg", r.mean_measured_deg},
                                     {"mean_residual_deg", r.mean_residual_deg},
                                     {"samples", r.samples}});
            }
            const json result = {
                {"r_squared", m.r_squared}, {"abs_error_std_deg", m.abs_error_std_deg}, {"residuals", residuals}};
            if (validate_json.empty()) {
                out << detail::dump(result);
            } else {
                detail::write_text(validate_json, detail::dump(result), validate_force);
            }
        } else if (curve->parsed()) {
            const double g = curve_g ? *curve_g : shear_from_youngs(curve_e.value_or(21.0));
            const auto spec = curve_hinge.spec(g);
            const double d_max = curve_d_max.value_or(0.9 * mechanics::max_displacement(spec));
            const auto grid = mechanics::linspace(curve_d_min, d_max, curve_points);
            const std::string csv = detail::curve_csv(mechanics::force_curve(grid, spec));
            if (curve_out.empty()) {
                out << csv;
            } else {
                detail::write_text(curve_out, csv, curve_force);
            }
        } else if (fit->parsed()) {
            fit_code = fit_failure;
            auto data = io::load_tensile_dataset(fit_data);
            if (fit_cycle) {
                data = data.select_cycle(fit_cycle);
            }
            const auto spec = fit_hinge.spec(1.0);
            mechanics::ModulusFit result;
            try {
                result = mechanics::fit_modulus(data, spec);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::MalformedInput) throw;
                throw CommandError(fit_failure, std::string("fit failed: ") + e.what());
            }
            const json j = {{"E_MPa", result.youngs_modulus_mpa},
                            {"G_MPa", result.shear_modulus_mpa},
                            {"r_squared", result.r_squared},
                            {"residual_norm", result.residual_norm}};
            std::string curve_text;
            if (!fit_curve.empty()) {
                double d_last = 0.0;
                for (const auto& p : data.select_cycle(data.first_cycle()).points) {
                    d_last = std::max(d_last, p.displacement_mm);
                }
                const auto grid = mechanics::linspace(0.0, d_last, fit_curve_points);
                curve_text = detail::curve_csv(
                    mechanics::force_curve(grid, mechanics::with_shear_modulus(spec, result.shear_modulus_mpa)));
                detail::ensure_writable(fit_curve, fit_force);
            }
            if (fit_json.empty()) {
                out << detail::dump(j);
            } else {
                detail::write_text(fit_json, detail::dump(j), fit_force);
            }
            if (!fit_curve.empty()) detail::write_text(fit_curve, curve_text, fit_force);
        } else if (rec->parsed()) {
            const auto trace = io::load_recovery_trace(rec_trace, rec_meta);
            if (rec_at.empty()) rec_at.push_back(30.0);
            json rates = json::array();
            for (double t : rec_at) {
                rates.push_back({{"t_min", t}, {"rate", recovery::rate_at(trace, t)}});
            }
            json result = {{"hold_duration_min", trace.hold_duration_min},
                           {"design_angle_deg", trace.design_angle_deg},
                           {"rates", rates}};
            try {
                const auto f = recovery::fit_two_phase(trace);
                result["fit"] = {{"r_inst", f.model.r_inst},
                                 {"r_slow", f.model.r_slow},
                                 {"tau_min", f.model.tau_min},
                                 {"rmse", f.rmse},
                                 {"exceeds_design", f.exceeds_design}};
                if (f.exceeds_design) {
                    err << "warning: fitted recovery r_inst + r_slow exceeds 1.05 of the design angle\n";
                }
            } catch (const Error& e) {
                result["fit"] = nullptr;
                result["fit_error"] = e.what();
            }
            if (rec_json.empty()) {
                out << detail::dump(result);
            } else {
                detail::write_text(rec_json, detail::dump(result), rec_force);
            }
        } else if (sim->parsed()) {
            auto loaded = io::load_sim_config(sim_config);
            auto& config = loaded.config;
            if (sim_seed) config.seed = *sim_seed;
            if (sim_threads) config.threads = *sim_threads;

            const fs::path dir = sim_out_dir;
            std::vector<fs::path> outputs = {dir / "summary.json", dir / "manifest.json"};
            if (sim_scatter) outputs.push_back(dir / "landings.csv");
            auto trajectory_path = [&](std::size_t i) {
                std::ostringstream name;
                name << "trajectory_" << std::setw(4) << std::setfill('0') << i << ".csv";
                return dir / "trajectories" / name.str();
            };
            if (!sim_no_traj) {
                for (std::size_t i = 0; i < config.n_airframes; ++i) outputs.push_back(trajectory_path(i));
            }
            for (const auto& p : outputs) detail::ensure_writable(p, sim_force);

            const auto result = dispersion::run_ensemble(config);

            detail::write_text(dir / "summary.json", detail::dump(io::ensemble_summary(config, result)), sim_force);
            if (sim_scatter) {
                std::ostringstream scatter;
                io::write_landing_scatter_csv(scatter, result);
                detail::write_text(dir / "landings.csv", scatter.str(), sim_force);
            }
            if (!sim_no_traj) {
                for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
                    std::ostringstream csv;
                    io::write_trajectory_csv(csv, result.trajectories[i]);
                    detail::write_text(trajectory_path(i), csv.str(), sim_force);
                }
            }
            json inputs = json::array();
            for (const auto& in : loaded.inputs) inputs.push_back({{"path", in.path}, {"sha256", in.sha256}});
            json output_list = json::array();
            for (const auto& p : outputs) output_list.push_back(p.lexically_relative(dir).generic_string());
            const json manifest = {{"tool", "foldhinge"},
                                   {"version", version},
                                   {"command", "simulate"},
                                   {"seed", config.seed},
                                   {"resolved_config", io::resolved_config(config)},
                                   {"inputs", inputs},
                                   {"outputs", output_list}};
            detail::write_text(dir / "manifest.json", detail::dump(manifest), sim_force);
            out << "dispersion diameter: " << io::format_number(result.dispersion_diameter_m) << " m over "
                << config.n_airframes << " airframes; mean hang time "
                << io::format_number(result.hang_time.mean_s) << " s\n";
        }
    } catch (const CommandError& e) {
        err << "error: " << e.what() << "\n";
        return e.code();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return detail::exit_code_for(e.kind(), fit_code);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return internal_error;
    }
    return ok;
}

}  // namespace foldhinge::cli
