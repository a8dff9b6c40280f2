#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wach/report.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw wach::UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int emit(const wach::RunOutcome& out, const std::string& out_path, const std::string& format) {
    const std::string& body = format == "text" ? out.report_text : out.report_json;
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw wach::UsageError("cannot write report to '" + out_path + "'");
        f << body;
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wach-module builder and verifier"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "json";
    unsigned long long seed = 0;
    bool seed_given = false, timing = false;
    unsigned long long selftest_p = 0;

    app.add_option("--out", out_path, "write the report to this path instead of stdout");
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
    app.add_option("--seed", seed, "seed for randomized self-tests")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_flag("--timing", timing, "include wall-clock timing in the report");

    CLI::App* build = app.add_subcommand("build", "construct the module and report it");
    build->add_option("--config", config_path, "JSON run configuration")->required();
    build->fallthrough();

    CLI::App* verify = app.add_subcommand("verify", "build then run the configured checks");
    verify->add_option("--config", config_path, "JSON run configuration")->required();
    verify->fallthrough();

    CLI::App* selftest = app.add_subcommand("selftest", "randomized oracle suites");
    selftest->add_option("p", selftest_p, "odd prime <= 13")->required();
    selftest->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        wach::RunOutcome out;
        if (selftest->parsed()) {
            out = wach::run_selftest(selftest_p, seed, timing);
        } else {
            wach::RunConfig cfg = wach::parse_config(slurp(config_path));
            if (seed_given) cfg.seed = seed;
            out = build->parsed() ? wach::run_build(cfg, timing) : wach::run_verify(cfg, timing);
        }
        return emit(out, out_path, format);
    } catch (const wach::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const wach::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const wach::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
