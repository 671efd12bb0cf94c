#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pucci/errors.hpp"
#include "pucci/harness.hpp"

namespace {

void print_record(const pucci::RunRecord& r) {
    for (const auto& s : r.results)
        std::printf("%-48s %.10g +- %.3g %s\n", s.name.c_str(), s.value, s.error, s.units.c_str());
    for (const auto& a : r.assertions)
        std::printf("[%s] %s  margin=%.4g error=%.3g %s\n", a.skipped ? "SKIP" : (a.passed ? "PASS" : "FAIL"),
                    a.name.c_str(), a.margin, a.error, a.detail.c_str());
    for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
    if (!r.message.empty()) std::fprintf(stderr, "error: %s\n", r.message.c_str());
    if (!r.run_dir.empty()) std::printf("written to %s\n", r.run_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Principal and nodal eigenvalues of Pucci operators"};
    app.set_version_flag("--version", pucci::kVersion);
    std::string experiment, config_path, out_dir;
    std::vector<std::string> sets;
    long long seed = -1;
    int workers = 0;
    bool no_write = false;
    app.add_option("experiment", experiment, "eval | radial-eig | grid-eig | solve | symmetry | verify-paper | sweep")
        ->required();
    app.add_option("--config", config_path, "key = value config file with [section] headers");
    app.add_option("--set", sets, "override, e.g. --set ell.beta=2")->take_all();
    app.add_option("--out", out_dir, "output root (default $PUCCI_SPECTRA_OUT or ./results)");
    app.add_option("--seed", seed, "random seed (default 42)");
    app.add_option("--workers", workers, "concurrent sweep runs");
    app.add_flag("--no-write", no_write, "print results without writing a run directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pucci::exit_config;
    }

    try {
        pucci::Config raw;
        if (!config_path.empty()) raw = pucci::Config::load(config_path);
        std::map<std::string, std::string> overrides;
        auto put = [&](const std::string& assignment) {
            const auto eq = assignment.find('=');
            if (eq == std::string::npos) throw pucci::ConfigError({"override '" + assignment + "' is not key=value"});
            overrides[assignment.substr(0, eq)] = assignment.substr(eq + 1);
        };
        for (const auto& s : sets) put(s);
        overrides["run.experiment"] = experiment;
        if (!out_dir.empty()) overrides["run.out_dir"] = out_dir;
        if (seed >= 0) overrides["run.seed"] = std::to_string(seed);
        if (workers > 0) overrides["run.workers"] = std::to_string(workers);
        const pucci::RunConfig cfg = pucci::RunConfig::from_config(raw, overrides);
        const pucci::RunRecord r = no_write ? pucci::run(cfg) : pucci::run_and_write(cfg);
        print_record(r);
        return r.status;
    } catch (const pucci::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return pucci::exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return pucci::exit_solver;
    }
}
