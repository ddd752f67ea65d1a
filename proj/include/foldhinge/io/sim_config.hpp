#pragma once

// JSON schema for simulation configs, run summaries and run manifests.
//
// Config layout (every field optional, defaults shown by resolved_config):
//   seed, release_altitude_m, floor_altitude_m, dt_s, n_airframes,
//   elevon_sigma_deg, max_steps, threads, density_scaled_airspeed,
//   glider  { airspeed_mps, glide_ratio, turn_gain_dps_per_deg, initial_heading_deg }
//   wind    { file } | { nodes: [[alt_m, east_mps, north_mps], ...] }
//   dryden  { sigma_u_mps, sigma_v_mps, length_u_m, length_v_m, airspeed_mps, dt_s }
// A manifest (an object with `resolved_config`) is accepted as a config too.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "foldhinge/dispersion.hpp"
#include "foldhinge/error.hpp"
#include "foldhinge/io/datasets.hpp"
#include "foldhinge/units.hpp"

namespace foldhinge::io {

using nlohmann::json;

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::MalformedInput, path.string() + ": cannot open file");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return hex.str();
}

struct InputDigest {
    std::string path;
    std::string sha256;
};

struct LoadedConfig {
    dispersion::SimConfig config;
    std::vector<InputDigest> inputs;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& field, const std::string& msg) {
    fail(ErrorKind::ConfigError, "config field '" + field + "': " + msg);
}

class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) config_error(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) config_error(field(key), "expected a number");
            out = v->get<double>();
        }
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
                config_error(field(key), "expected a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) config_error(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void reject_unknown() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) config_error(field(item.key()), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

inline LoadedConfig parse_sim_config(const json& document, const std::filesystem::path& base_dir) {
    const json& root = document.is_object() && document.contains("resolved_config")
                           ? document.at("resolved_config")
                           : document;
    LoadedConfig loaded;
    auto& c = loaded.config;
    bool dryden_airspeed_given = false;

    detail::ObjectReader r(root, "");
    r.unsigned_integer("seed", c.seed);
    r.number("release_altitude_m", c.release_altitude_m);
    r.number("floor_altitude_m", c.floor_altitude_m);
    r.number("dt_s", c.dt_s);
    std::uint64_t n = c.n_airframes;
    r.unsigned_integer("n_airframes", n);
    c.n_airframes = static_cast<std::size_t>(n);
    r.number("elevon_sigma_deg", c.elevon_sigma_deg);
    std::uint64_t steps = c.max_steps;
    r.unsigned_integer("max_steps", steps);
    c.max_steps = static_cast<std::size_t>(steps);
    std::uint64_t threads = c.threads;
    r.unsigned_integer("threads", threads);
    c.threads = static_cast<unsigned>(threads);
    r.boolean("density_scaled_airspeed", c.density_scaled_airspeed);

    if (const json* g = r.find("glider")) {
        detail::ObjectReader gr(*g, "glider");
        gr.number("airspeed_mps", c.glider.airspeed_mps);
        gr.number("glide_ratio", c.glider.glide_ratio);
        gr.number("turn_gain_dps_per_deg", c.glider.turn_gain_dps_per_deg);
        double heading_deg = rad_to_deg(c.glider.initial_heading_rad);
        gr.number("initial_heading_deg", heading_deg);
        c.glider.initial_heading_rad = deg_to_rad(heading_deg);
        gr.reject_unknown();
    }

    if (const json* d = r.find("dryden")) {
        detail::ObjectReader dr(*d, "dryden");
        dr.number("sigma_u_mps", c.dryden.sigma_u_mps);
        dr.number("sigma_v_mps", c.dryden.sigma_v_mps);
        dr.number("length_u_m", c.dryden.length_u_m);
        dr.number("length_v_m", c.dryden.length_v_m);
        dryden_airspeed_given = dr.find("airspeed_mps") != nullptr;
        dr.number("airspeed_mps", c.dryden.airspeed_mps);
        dr.number("dt_s", c.gust_dt_s);
        dr.reject_unknown();
    }
    if (!dryden_airspeed_given) c.dryden.airspeed_mps = c.glider.airspeed_mps;

    if (const json* w = r.find("wind")) {
        detail::ObjectReader wr(*w, "wind");
        const json* file = wr.find("file");
        const json* nodes = wr.find("nodes");
        wr.reject_unknown();
        if ((file != nullptr) == (nodes != nullptr)) {
            detail::config_error("wind", "give exactly one of 'file' or 'nodes'");
        }
        if (file) {
            if (!file->is_string()) detail::config_error("wind.file", "expected a path string");
            std::filesystem::path p = file->get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            c.wind = load_wind_profile(p.string());
            loaded.inputs.push_back({file->get<std::string>(), sha256_file(p)});
        } else {
            if (!nodes->is_array() || nodes->empty()) {
                detail::config_error("wind.nodes", "expected a non-empty array of [alt_m, east_mps, north_mps]");
            }
            std::vector<atmosphere::WindNode> list;
            for (std::size_t i = 0; i < nodes->size(); ++i) {
                const json& node = (*nodes)[i];
                const std::string where = "wind.nodes[" + std::to_string(i) + "]";
                if (!node.is_array() || node.size() != 3 || !node[0].is_number() || !node[1].is_number() ||
                    !node[2].is_number()) {
                    detail::config_error(where, "expected [alt_m, east_mps, north_mps]");
                }
                if (!list.empty() && !(node[0].get<double>() > list.back().altitude_m)) {
                    detail::config_error(where, "altitudes must strictly increase");
                }
                list.push_back({node[0].get<double>(), node[1].get<double>(), node[2].get<double>()});
            }
            c.wind = atmosphere::WindProfile(std::move(list));
        }
    }
    r.reject_unknown();

    // Single-field ranges are reported against the field; cross-field rules
    // fall through to SimConfig::validate.
    const auto require = [](bool ok, const char* field, const char* msg) {
        if (!ok) detail::config_error(field, msg);
    };
    require(c.release_altitude_m > 0.0, "release_altitude_m", "must be positive");
    require(c.floor_altitude_m >= 0.0, "floor_altitude_m", "must be non-negative");
    require(c.dt_s > 0.0, "dt_s", "must be positive");
    require(c.n_airframes >= 1, "n_airframes", "must be at least 1");
    require(c.elevon_sigma_deg >= 0.0, "elevon_sigma_deg", "must be non-negative");
    require(c.max_steps >= 1, "max_steps", "must be at least 1");
    require(c.glider.airspeed_mps > 0.0, "glider.airspeed_mps", "must be positive");
    require(c.glider.glide_ratio > 0.0, "glider.glide_ratio", "must be positive");
    require(c.glider.turn_gain_dps_per_deg >= 0.0, "glider.turn_gain_dps_per_deg", "must be non-negative");
    require(std::isfinite(c.glider.initial_heading_rad), "glider.initial_heading_deg", "must be finite");
    require(c.dryden.sigma_u_mps >= 0.0, "dryden.sigma_u_mps", "must be non-negative");
    require(c.dryden.sigma_v_mps >= 0.0, "dryden.sigma_v_mps", "must be non-negative");
    require(c.dryden.length_u_m > 0.0, "dryden.length_u_m", "must be positive");
    require(c.dryden.length_v_m > 0.0, "dryden.length_v_m", "must be positive");
    require(c.dryden.airspeed_mps > 0.0, "dryden.airspeed_mps", "must be positive");
    require(c.gust_dt_s > 0.0, "dryden.dt_s", "must be positive");

    try {
        c.validate();
    } catch (const Error& e) {
        fail(ErrorKind::ConfigError, std::string("config: ") + e.what());
    }
    return loaded;
}

inline LoadedConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ConfigError, path.string() + ": cannot open config");
    json document;
    try {
        document = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ConfigError, path.string() + ": " + e.what());
    }
    LoadedConfig loaded = parse_sim_config(document, path.parent_path());
    loaded.inputs.insert(loaded.inputs.begin(), {path.string(), sha256_file(path)});
    return loaded;
}

/// Every config field with defaults materialised and the wind profile inlined.
/// `threads` is left out: it never changes results, so it is not part of a run's identity.
inline json resolved_config(const dispersion::SimConfig& c) {
    json nodes = json::array();
    for (const auto& n : c.wind.nodes()) nodes.push_back({n.altitude_m, n.east_mps, n.north_mps});
    return json{
        {"seed", c.seed},
        {"release_altitude_m", c.release_altitude_m},
        {"floor_altitude_m", c.floor_altitude_m},
        {"dt_s", c.dt_s},
        {"n_airframes", c.n_airframes},
        {"elevon_sigma_deg", c.elevon_sigma_deg},
        {"max_steps", c.max_steps},
        {"density_scaled_airspeed", c.density_scaled_airspeed},
        {"glider",
         {{"airspeed_mps", c.glider.airspeed_mps},
          {"glide_ratio", c.glider.glide_ratio},
          {"turn_gain_dps_per_deg", c.glider.turn_gain_dps_per_deg},
          {"initial_heading_deg", rad_to_deg(c.glider.initial_heading_rad)}}},
        {"wind", {{"nodes", nodes}}},
        {"dryden",
         {{"sigma_u_mps", c.dryden.sigma_u_mps},
          {"sigma_v_mps", c.dryden.sigma_v_mps},
          {"length_u_m", c.dryden.length_u_m},
          {"length_v_m", c.dryden.length_v_m},
          {"airspeed_mps", c.dryden.airspeed_mps},
          {"dt_s", c.gust_dt_s}}},
    };
}

inline json ensemble_summary(const dispersion::SimConfig& config, const dispersion::EnsembleResult& result) {
    json landings = json::array();
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const auto& t = result.trajectories[i];
        landings.push_back({{"index", i},
                            {"x_m", t.landing.x_east_m},
                            {"y_m", t.landing.y_north_m},
                            {"elevon_delta_deg", t.elevon_delta_deg},
                            {"hang_time_s", t.hang_time_s}});
    }
    return json{
        {"seed", config.seed},
        {"n_airframes", config.n_airframes},
        {"floor_altitude_m", config.floor_altitude_m},
        {"dispersion_diameter_m", result.dispersion_diameter_m},
        {"hang_time_s",
         {{"min", result.hang_time.min_s}, {"mean", result.hang_time.mean_s}, {"max", result.hang_time.max_s}}},
        {"landings", landings},
    };
}

inline void write_trajectory_csv(std::ostream& out, const dispersion::Trajectory& t) {
    CsvWriter w(out);
    w.header({"t_s", "x_m", "y_m", "alt_m", "heading_rad"});
    for (const auto& s : t.samples) w.row({s.t_s, s.x_east_m, s.y_north_m, s.altitude_m, s.heading_rad});
}

inline void write_landing_scatter_csv(std::ostream& out, const dispersion::EnsembleResult& result) {
    CsvWriter w(out);
    w.header({"index", "x_m", "y_m", "elevon_delta_deg", "hang_time_s"});
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const auto& t = result.trajectories[i];
        w.row({static_cast<double>(i), t.landing.x_east_m, t.landing.y_north_m, t.elevon_delta_deg, t.hang_time_s});
    }
}

}  // namespace foldhinge::io
