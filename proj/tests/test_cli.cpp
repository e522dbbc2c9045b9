// End-to-end checks of the lab executable: exit-code contract, schema
// rejection, byte-for-byte reproducibility of outputs, thread invariance,
// suites, and report generation.  The binary path arrives in LAB_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string lab_bin() {
    const char* env = std::getenv("LAB_BIN");
    REQUIRE(env != nullptr);
    return env;
}

// Runs a shell command, captures combined output, returns the exit code.
int run_cmd(const std::string& args, std::string* output = nullptr) {
    const fs::path log = fs::path("cli_scratch") / "last_output.txt";
    const std::string cmd = lab_bin() + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(log);
        std::ostringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << "\n";
}

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

json doubling_config() {
    return json{{"schema_version", 1},
                {"experiment", "doubling_wholespace"},
                {"domain", {{"kind", "whole_space"}, {"n", 1}}},
                {"field", {{"name", "identity"}, {"nu", 1.0}, {"form", "div"}}},
                {"grid", {{"h", 0.05}}},
                {"params",
                 {{"K", 8.0}, {"r_list", {0.5, 1.0}}, {"t_list", {0.25, 1.0}}, {"x_per_t", 1}}}};
}

// Files an experiment writes, sorted, excluding the manifest.
std::vector<fs::path> data_files(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().find("manifest") == std::string::npos)
            out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

struct Scratch {
    Scratch() {
        fs::remove_all("cli_scratch");
        fs::create_directories("cli_scratch");
    }
} scratch_once;

}  // namespace

TEST_CASE("configs that violate the schema are rejected with exit 2") {
    const fs::path dir = "cli_scratch";
    // not even JSON
    {
        std::ofstream out(dir / "broken.json");
        out << "{ not json";
    }
    std::string msg;
    CHECK(run_cmd("run " + (dir / "broken.json").string(), &msg) == 2);
    CHECK(msg.find("config error") != std::string::npos);

    // JSON, but missing nearly everything; every problem is listed at once
    write_json(dir / "empty.json", json{{"experiment", "measure_profile"}});
    CHECK(run_cmd("run " + (dir / "empty.json").string(), &msg) == 2);
    CHECK(msg.find("rejected by schema") != std::string::npos);
    CHECK(msg.find("schema_version") != std::string::npos);
    CHECK(msg.find("domain") != std::string::npos);
    CHECK(msg.find("grid") != std::string::npos);

    // unknown keys are refused, not ignored
    json cfg = profile_config();
    cfg["params"]["typo_key"] = 1.0;
    write_json(dir / "typo.json", cfg);
    CHECK(run_cmd("run " + (dir / "typo.json").string(), &msg) == 2);
    CHECK(msg.find("typo_key") != std::string::npos);

    // a seed with nothing random to consume is an error, not a default
    json seeded = profile_config();
    seeded["seed"] = 7;
    write_json(dir / "seeded.json", seeded);
    CHECK(run_cmd("run " + (dir / "seeded.json").string(), &msg) == 2);
    CHECK(msg.find("seed") != std::string::npos);
}

TEST_CASE("a time step that breaks monotonicity exits 3") {
    const fs::path dir = "cli_scratch";
    json cfg = profile_config();
    cfg["grid"]["tau"] = 0.0025;  // tau = h^2: the step weights go negative
    write_json(dir / "unstable.json", cfg);
    std::string msg;
    CHECK(run_cmd("run " + (dir / "unstable.json").string() + " --out " +
                      (dir / "unstable_out").string(),
                  &msg) == 3);
    CHECK(msg.find("scheme failure") != std::string::npos);
}

TEST_CASE("rerunning a config reproduces every output byte for byte") {
    const fs::path dir = "cli_scratch";
    write_json(dir / "profile.json", profile_config());
    const std::string cfg = (dir / "profile.json").string();
    REQUIRE(run_cmd("run " + cfg + " --out " + (dir / "out1").string()) == 0);
    REQUIRE(run_cmd("run " + cfg + " --out " + (dir / "out2").string()) == 0);

    const auto a = data_files(dir / "out1");
    const auto b = data_files(dir / "out2");
    REQUIRE(a.size() == b.size());
    REQUIRE(!a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].filename() == b[i].filename());
        CHECK(slurp(a[i]) == slurp(b[i]));
    }
}

TEST_CASE("thread count changes nothing in the written results") {
    const fs::path dir = "cli_scratch";
    write_json(dir / "doubling.json", doubling_config());
    const std::string cfg = (dir / "doubling.json").string();
    REQUIRE(run_cmd("run " + cfg + " --out " + (dir / "serial").string()) == 0);
    REQUIRE(run_cmd("run " + cfg + " --threads 4 --out " + (dir / "parallel").string()) == 0);

    const auto a = data_files(dir / "serial");
    const auto b = data_files(dir / "parallel");
    REQUIRE(a.size() == b.size());
    REQUIRE(!a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(slurp(a[i]) == slurp(b[i]));
}

TEST_CASE("every result row carries the experiment id and config hash") {
    const fs::path dir = "cli_scratch";
    write_json(dir / "profile2.json", profile_config());
    REQUIRE(run_cmd("run " + (dir / "profile2.json").string() + " --out " +
                    (dir / "rows").string()) == 0);
    fs::path csv;
    for (const auto& e : fs::directory_iterator(dir / "rows"))
        if (e.path().extension() == ".csv") csv = e.path();
    REQUIRE(!csv.empty());
    const std::string text = slurp(csv);
    std::istringstream lines(text);
    std::string header, line;
    REQUIRE(std::getline(lines, header));
    CHECK(header.rfind("experiment,config_hash,", 0) == 0);
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line == "\r") continue;
        CHECK(line.rfind("measure_profile,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("a failed assertion exits 1 but still writes the results") {
    const fs::path dir = "cli_scratch";
    json cfg = profile_config();
    cfg["assert"] = json::array(
        {json{{"metric", "value@r=1"}, {"equals", 0.9}, {"rel_tol", 0.001}}});
    write_json(dir / "failing.json", cfg);
    std::string msg;
    CHECK(run_cmd("run " + (dir / "failing.json").string() + " --out " +
                      (dir / "failed").string(),
                  &msg) == 1);
    CHECK(msg.find("[FAIL]") != std::string::npos);
    CHECK(!data_files(dir / "failed").empty());

    bool manifest_written = false;
    for (const auto& e : fs::directory_iterator(dir / "failed"))
        if (e.path().filename().string().find("manifest") != std::string::npos)
            manifest_written = true;
    CHECK(manifest_written);
}

TEST_CASE("report turns a manifest into plot data") {
    const fs::path dir = "cli_scratch";
    write_json(dir / "profile3.json", profile_config());
    std::string msg;
    REQUIRE(run_cmd("run " + (dir / "profile3.json").string() + " --out " +
                        (dir / "rep_in").string(),
                    &msg) == 0);
    fs::path manifest;
    for (const auto& e : fs::directory_iterator(dir / "rep_in"))
        if (e.path().filename().string().find("manifest") != std::string::npos)
            manifest = e.path();
    REQUIRE(!manifest.empty());

    REQUIRE(run_cmd("report " + manifest.string() + " --out " + (dir / "rep_out").string(),
                    &msg) == 0);
    bool profile = false, constants = false;
    for (const auto& e : fs::directory_iterator(dir / "rep_out")) {
        const std::string name = e.path().filename().string();
        if (name.find(".profile.dat") != std::string::npos) profile = true;
        if (name.find(".constants.txt") != std::string::npos) constants = true;
    }
    CHECK(profile);
    CHECK(constants);
}

TEST_CASE("the smoke suite passes and unknown suites are rejected") {
    const fs::path dir = "cli_scratch";
    std::string msg;
    CHECK(run_cmd("suite smoke --out " + (dir / "smoke").string(), &msg) == 0);
    CHECK(msg.find("[PASS] suite smoke") != std::string::npos);
    CHECK(fs::exists(dir / "smoke" / "suite_smoke.manifest.json"));

    CHECK(run_cmd("suite nope --out " + (dir / "nope").string(), &msg) == 2);
    CHECK(msg.find("unknown suite") != std::string::npos);
}

TEST_CASE("bad command lines exit 2") {
    std::string msg;
    CHECK(run_cmd("frobnicate", &msg) == 2);
    CHECK(run_cmd("run", &msg) == 2);
    CHECK(run_cmd("--definitely-not-a-flag", &msg) == 2);
}
