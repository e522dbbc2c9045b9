// Library-level checks of the experiment runner: schema validation with
// default filling, the manifest/summary/CSV trio written by a run, metric
// assertions, and report generation from a manifest.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "caloric/runner.hpp"
#include "caloric/util.hpp"

using namespace caloric;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json profile_config() {
    return json{{"schema_version", 1},
                {"experiment", "measure_profile"},
                {"domain", {{"kind", "whole_space"}, {"n", 1}}},
                {"field", {{"name", "identity"}, {"nu", 1.0}, {"form", "div"}}},
                {"grid", {{"h", 0.05}}},
                {"params",
                 {{"X", {0.0, 1.0}},
                  {"Y", {0.0, 0.0}},
                  {"r_list", {0.5, 1.0, 2.0}},
                  {"half_width", 8.0}}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Scratch {
    Scratch() {
        fs::remove_all("runner_scratch");
        fs::create_directories("runner_scratch");
    }
} scratch_once;

}  // namespace

TEST_CASE("validation fills documented defaults without touching the rest") {
    const json cfg = validate_config(profile_config());
    CHECK(cfg.at("grid").at("tau").get<double>() == 0.0);
    CHECK(cfg.at("grid").at("margin").get<double>() == 6.0);
    CHECK(cfg.at("params").at("mc_paths").get<long>() == 0);
    CHECK(cfg.at("params").at("r_list").size() == 3);
}

TEST_CASE("validation lists every violation at once") {
    json cfg = profile_config();
    cfg["schema_version"] = 99;
    cfg["grid"].erase("h");
    cfg["params"].erase("X");
    cfg["params"]["bogus"] = true;
    try {
        validate_config(cfg);
        REQUIRE(false);
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("schema_version") != std::string::npos);
        CHECK(msg.find("\"h\"") != std::string::npos);
        CHECK(msg.find("\"X\"") != std::string::npos);
        CHECK(msg.find("bogus") != std::string::npos);
    }
}

TEST_CASE("seeds are demanded by randomness and refused without it") {
    // Monte Carlo paths make the run random: a seed becomes mandatory
    json mc = profile_config();
    mc["params"]["mc_paths"] = 1000;
    CHECK_THROWS_AS(validate_config(mc), ConfigError);
    mc["seed"] = 11u;
    CHECK_NOTHROW(validate_config(mc));

    // without anything random the same seed is rejected
    json plain = profile_config();
    plain["seed"] = 11u;
    CHECK_THROWS_AS(validate_config(plain), ConfigError);
}

TEST_CASE("unknown experiments are rejected") {
    json cfg = profile_config();
    cfg["experiment"] = "does_not_exist";
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("a run writes csv, summary and manifest, and passes its assertions") {
    json cfg = profile_config();
    cfg["assert"] = json::array({
        json{{"metric", "value@r=1"}, {"equals", 0.52049987781304654}, {"rel_tol", 0.015}},
        json{{"metric", "truncation"}, {"at_most", 1e-6}},
    });
    RunOptions opt;
    opt.out_dir = "runner_scratch/run1";
    const RunResult res = run_config(cfg, opt);
    CHECK(res.exit_code == 0);
    REQUIRE(res.outputs.size() == 3);
    for (const auto& name : res.outputs) CHECK(fs::exists(fs::path(opt.out_dir) / name));

    CHECK(res.manifest.at("status") == "pass");
    CHECK(res.manifest.at("experiment") == "measure_profile");
    CHECK(res.manifest.at("config").at("grid").at("margin").get<double>() == 6.0);
    CHECK(res.manifest.at("grid_sizes").size() == 1);
    CHECK(res.manifest.at("wall_ms").get<double>() > 0.0);

    // the summary repeats the metrics the assertions consumed
    const json summary =
        json::parse(slurp(fs::path(opt.out_dir) / res.outputs[1]));
    CHECK(summary.at("config_hash") == res.manifest.at("config_hash"));
    CHECK(summary.at("metrics").at("value@r=2").get<double>() ==
          doctest::Approx(0.84270079294971487).epsilon(0.015));

    // rerunning in process produces identical bytes for csv and summary
    RunOptions opt2;
    opt2.out_dir = "runner_scratch/run2";
    const RunResult res2 = run_config(cfg, opt2);
    CHECK(slurp(fs::path(opt.out_dir) / res.outputs[0]) ==
          slurp(fs::path(opt2.out_dir) / res2.outputs[0]));
    CHECK(slurp(fs::path(opt.out_dir) / res.outputs[1]) ==
          slurp(fs::path(opt2.out_dir) / res2.outputs[1]));
}

TEST_CASE("failed assertions flip the exit code and are recorded") {
    json cfg = profile_config();
    cfg["assert"] = json::array({
        json{{"metric", "value@r=1"}, {"equals", 0.9}, {"rel_tol", 0.001}},
        json{{"metric", "no_such_metric"}, {"at_least", 0.0}},
    });
    RunOptions opt;
    opt.out_dir = "runner_scratch/fail";
    const RunResult res = run_config(cfg, opt);
    CHECK(res.exit_code == 1);
    REQUIRE(res.assertions.size() == 2);
    CHECK_FALSE(res.assertions[0].passed);
    CHECK_FALSE(res.assertions[1].passed);
    CHECK(res.assertions[1].detail.find("not produced") != std::string::npos);
    CHECK(res.manifest.at("status") == "fail");
}

TEST_CASE("reports carry plot data for profiles and doubling sweeps") {
    RunOptions opt;
    opt.out_dir = "runner_scratch/rep";

    const RunResult prof = run_config(profile_config(), opt);
    const auto prof_files = write_report(prof.manifest_path, "runner_scratch/rep");
    bool saw_profile = false;
    for (const auto& f : prof_files) {
        if (f.find(".profile.dat") == std::string::npos) continue;
        saw_profile = true;
        // two columns, one row per radius, radii ascending
        std::istringstream is(slurp(fs::path("runner_scratch/rep") / f));
        std::string line;
        std::vector<double> rs;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ls(line);
            double r = 0.0, v = 0.0;
            REQUIRE((ls >> r >> v));
            rs.push_back(r);
        }
        REQUIRE(rs.size() == 3);
        CHECK(rs[0] < rs[1]);
        CHECK(rs[1] < rs[2]);
    }
    CHECK(saw_profile);

    const json dbl = json{{"schema_version", 1},
                          {"experiment", "doubling_wholespace"},
                          {"domain", {{"kind", "whole_space"}, {"n", 1}}},
                          {"field", {{"name", "identity"}, {"nu", 1.0}, {"form", "div"}}},
                          {"grid", {{"h", 0.05}}},
                          {"params",
                           {{"K", 8.0}, {"r_list", {0.5, 1.0}}, {"t_list", {1.0}}}}};
    const RunResult sweep = run_config(dbl, opt);
    const auto sweep_files = write_report(sweep.manifest_path, "runner_scratch/rep");
    bool saw_curve = false, saw_constants = false;
    for (const auto& f : sweep_files) {
        if (f.find(".X0.dat") != std::string::npos) saw_curve = true;
        if (f.find(".constants.txt") != std::string::npos) saw_constants = true;
    }
    CHECK(saw_curve);
    CHECK(saw_constants);
}

TEST_CASE("suite names are validated") {
    RunOptions opt;
    opt.out_dir = "runner_scratch/suite";
    CHECK_THROWS_AS(run_suite("definitely_not_a_suite", opt), ConfigError);
}
