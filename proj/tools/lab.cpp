// Command-line front end: run one experiment config, turn a manifest into
// plot data, or run a named suite.  Exit codes: 0 success, 1 an assertion
// failed (results are still written), 2 the input was rejected, 3 the
// discretization could not be made monotone.
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "caloric/runner.hpp"
#include "caloric/util.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for exit distributions of parabolic chains"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, suite_name;
    std::string out_dir = ".";
    int threads = 1;

    CLI::App* run = app.add_subcommand("run", "execute one experiment config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: current)");
    run->add_option("--threads", threads, "worker threads; results are identical");

    CLI::App* report = app.add_subcommand("report", "turn a run manifest into plot data");
    report->add_option("manifest", manifest_path, "manifest written by `lab run`")->required();
    report->add_option("--out", out_dir, "output directory (default: current)");

    CLI::App* suite = app.add_subcommand("suite", "run a named suite");
    suite->add_option("name", suite_name, "one of: smoke, acceptance, full")->required();
    suite->add_option("--out", out_dir, "output directory (default: current)");
    suite->add_option("--threads", threads, "worker threads; results are identical");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    caloric::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads < 1 ? 1 : threads;

    try {
        if (run->parsed()) {
            const caloric::RunResult res = caloric::run_config_file(config_path, opt);
            for (const auto& a : res.assertions)
                std::cout << (a.passed ? "[PASS] " : "[FAIL] ") << a.name << ": " << a.detail
                          << "\n";
            std::cout << "manifest: " << res.manifest_path << "\n";
            return res.exit_code;
        }
        if (report->parsed()) {
            for (const std::string& f : caloric::write_report(manifest_path, out_dir))
                std::cout << f << "\n";
            return 0;
        }
        return caloric::run_suite(suite_name, opt);
    } catch (const caloric::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const caloric::SchemeError& e) {
        std::cerr << "scheme failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
