#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <json.hpp>

#include "foldhinge/cli.hpp"
#include "foldhinge/hinge_mechanics.hpp"
#include "foldhinge/io/csv.hpp"
#include "support/tempdir.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "foldhinge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = foldhinge::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// A fast ensemble: short drop, calm air, symmetric airframes.
const char* calm_config = R"({
    "seed": 5, "n_airframes": 3, "elevon_sigma_deg": 0,
    "release_altitude_m": 6000, "floor_altitude_m": 5000,
    "dryden": {"sigma_u_mps": 0, "sigma_v_mps": 0}
})";

}  // namespace

TEST_CASE("version and usage", "[cli]") {
    const auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK_THAT(v.out, ContainsSubstring("1.0.0"));
    CHECK(run({}).code == 2);
    CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("design", "[cli][design]") {
    TempDir dir;
    const auto j = dir.path() / "d.json";
    const auto a = run({"design", "--angle-deg", "60", "--json", j.string()});
    REQUIRE(a.code == 0);
    CHECK_THAT(a.out, ContainsSubstring("required gap: 1.03672557568463"));
    CHECK_THAT(read_json(j)["gap_mm"].get<double>(), WithinRel(1.0367255756846318, 1e-12));

    const auto zero = run({"design", "--gap-mm", "0"});
    CHECK(zero.code == 0);
    CHECK_THAT(zero.out, ContainsSubstring("fold angle: 0 deg"));

    const auto small = run({"design", "--gap-mm", "0.99", "--json", (dir.path() / "s.json").string()});
    CHECK(small.code == 0);
    CHECK_THAT(read_json(dir.path() / "s.json")["angle_deg"].get<double>(), WithinAbs(57.2958, 1e-4));

    CHECK(run({"design", "--gap-mm", "1", "--angle-deg", "60"}).code == 2);
    CHECK(run({"design"}).code == 2);
    CHECK(run({"design", "--angle-deg", "181"}).code == 3);
    CHECK(run({"design", "--gap-mm", "4"}).code == 3);

    // Existing output is not overwritten without --force.
    CHECK(run({"design", "--angle-deg", "50", "--json", j.string()}).code == 2);
    CHECK(run({"design", "--angle-deg", "50", "--json", j.string(), "--force"}).code == 0);
}

TEST_CASE("validate", "[cli][design]") {
    TempDir dir;
    const auto p = dir.write("a.csv", "gap_mm,angle_deg\n0.2,11.6\n0.2,11.5\n1.0,57.9\n1.0,58.0\n");
    const auto r = run({"validate", "--data", p.string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["r_squared"].get<double>() > 0.99);
    CHECK(j["residuals"].size() == 2);
    CHECK(run({"validate", "--data", dir.write("b.csv", "gap_mm,angle\n").string()}).code == 4);
}

TEST_CASE("mechanics curve", "[cli][mechanics]") {
    const auto r = run({"mechanics", "curve", "--arm-length-mm", "10", "--width-mm", "10", "--points", "5"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto t = foldhinge::io::parse_csv(in, "curve", {"displacement_mm", "force_N"});
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows[0].values[1] == 0.0);

    const auto empty = run({"mechanics", "curve", "--arm-length-mm", "10", "--width-mm", "10", "--points", "0"});
    CHECK(empty.code == 0);
    CHECK(empty.out == "displacement_mm,force_N\n");

    CHECK(run({"mechanics", "curve", "--arm-length-mm", "10"}).code == 2);
    CHECK(run({"mechanics", "curve", "--arm-length-mm", "10", "--width-mm", "10", "--E-mpa", "21", "--G-mpa", "7"})
              .code == 2);
    CHECK(run({"mechanics", "curve", "--arm-length-mm", "10", "--width-mm", "10", "--d-max", "5"}).code == 2);
}

TEST_CASE("mechanics fit", "[cli][mechanics]") {
    using namespace foldhinge::mechanics;
    TempDir dir;
    HingeMechSpec spec;
    spec.arm_length_mm = 10.0;
    spec.width_mm = 10.0;
    spec.shear_modulus_mpa = 7.0;
    std::string csv = "displacement_mm,force_N\n";
    for (const auto& p : force_curve(linspace(0.05, 1.5, 20), spec)) {
        csv += foldhinge::io::format_number(p.displacement_mm) + "," + foldhinge::io::format_number(p.force_n) + "\n";
    }
    const auto data = dir.write("t.csv", csv);
    const auto curve = dir.path() / "fit_curve.csv";
    const auto r = run({"mechanics", "fit", "--data", data.string(), "--arm-length-mm", "10", "--width-mm", "10",
                        "--out-curve", curve.string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK_THAT(j["E_MPa"].get<double>(), WithinRel(21.0, 1e-9));
    CHECK_THAT(j["G_MPa"].get<double>(), WithinRel(7.0, 1e-9));
    CHECK(fs::exists(curve));

    const auto two = dir.write("two.csv", "displacement_mm,force_N\n0.1,0.05\n0.2,0.1\n");
    CHECK(run({"mechanics", "fit", "--data", two.string(), "--arm-length-mm", "10", "--width-mm", "10"}).code == 5);

    const auto bad = dir.write("bad.csv", "displacement_mm,force_N\n0.1,0.05\n0.2,zz\n");
    const auto b = run({"mechanics", "fit", "--data", bad.string(), "--arm-length-mm", "10", "--width-mm", "10"});
    CHECK(b.code == 4);
    CHECK_THAT(b.err, ContainsSubstring("bad.csv:3:"));
}

TEST_CASE("recovery", "[cli][recovery]") {
    TempDir dir;
    const auto meta = dir.write("m.json", R"({"hold_duration_min": 120, "design_angle_deg": 60})");
    std::string csv = "t_min,angle_deg\n";
    for (int t = 0; t <= 40; t += 5) csv += std::to_string(t) + ",51\n";
    const auto trace = dir.write("r.csv", csv);
    const auto r = run({"recovery", "--trace", trace.string(), "--meta", meta.string(), "--at", "30", "--at", "12.5"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK_THAT(j["rates"][0]["rate"].get<double>(), WithinAbs(0.85, 1e-12));
    CHECK_THAT(j["rates"][1]["rate"].get<double>(), WithinAbs(0.85, 1e-12));
    CHECK_FALSE(j["fit"].is_null());

    const auto short_trace = dir.write("s.csv", "t_min,angle_deg\n0,40\n30,51\n");
    const auto s = run({"recovery", "--trace", short_trace.string(), "--meta", meta.string()});
    CHECK(s.code == 0);
    CHECK(json::parse(s.out)["fit"].is_null());

    const auto empty = dir.write("e.csv", "t_min,angle_deg\n");
    CHECK(run({"recovery", "--trace", empty.string(), "--meta", meta.string()}).code == 4);
    CHECK(run({"recovery", "--trace", trace.string(), "--meta", meta.string(), "--at", "99"}).code == 2);
}

TEST_CASE("simulate", "[cli][simulate]") {
    TempDir dir;
    const auto config = dir.write("c.json", calm_config);
    const auto out = dir.path() / "run";
    const auto r = run({"simulate", "--config", config.string(), "--out-dir", out.string(), "--scatter"});
    REQUIRE(r.code == 0);
    const auto summary = read_json(out / "summary.json");
    CHECK(summary["landings"].size() == 3);
    CHECK_THAT(summary["landings"][0]["y_m"].get<double>(), WithinRel(10.0 * 1000.0, 1e-9));
    CHECK(summary["dispersion_diameter_m"].get<double>() < 1.0);
    CHECK(fs::exists(out / "trajectories" / "trajectory_0002.csv"));
    CHECK(fs::exists(out / "landings.csv"));

    const auto manifest = read_json(out / "manifest.json");
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["inputs"][0]["sha256"] == foldhinge::io::sha256_file(config));
    CHECK(manifest["resolved_config"]["n_airframes"] == 3);

    SECTION("refuses to overwrite, then reruns byte-identically with --force") {
        const auto first = slurp(out / "summary.json");
        CHECK(run({"simulate", "--config", config.string(), "--out-dir", out.string()}).code == 2);
        CHECK(run({"simulate", "--config", config.string(), "--out-dir", out.string(), "--force", "--threads", "3"})
                  .code == 0);
        CHECK(slurp(out / "summary.json") == first);
    }
    SECTION("a manifest replays the run") {
        const auto again = dir.path() / "replay";
        REQUIRE(run({"simulate", "--config", (out / "manifest.json").string(), "--out-dir", again.string(),
                     "--no-trajectories"})
                    .code == 0);
        CHECK(slurp(again / "summary.json") == slurp(out / "summary.json"));
        CHECK_FALSE(fs::exists(again / "trajectories"));
    }
    SECTION("schema errors exit 2 and name the field") {
        const auto bad = dir.write("bad.json", R"({"glider": {"glide_ratio": -1}})");
        const auto b = run({"simulate", "--config", bad.string(), "--out-dir", (dir.path() / "x").string()});
        CHECK(b.code == 2);
        CHECK_THAT(b.err, ContainsSubstring("glide_ratio"));
        const auto typo = dir.write("typo.json", R"({"dryden": {"sigma_w_mps": 1}})");
        const auto t = run({"simulate", "--config", typo.string(), "--out-dir", (dir.path() / "y").string()});
        CHECK(t.code == 2);
        CHECK_THAT(t.err, ContainsSubstring("dryden.sigma_w_mps"));
    }
    SECTION("step budget exits 6") {
        const auto tight = dir.write("tight.json", R"({"max_steps": 10, "n_airframes": 1})");
        CHECK(run({"simulate", "--config", tight.string(), "--out-dir", (dir.path() / "z").string()}).code == 6);
    }
}
