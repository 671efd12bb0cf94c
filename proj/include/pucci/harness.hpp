#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pucci/config.hpp"
#include "pucci/geometry.hpp"
#include "pucci/grid.hpp"
#include "pucci/pucci_core.hpp"
#include "pucci/semilinear.hpp"
#include "pucci/symmetry.hpp"

namespace pucci {

inline constexpr const char* kVersion = "pucci-spectra 0.1.0";

/// Exit statuses of a run.
enum ExitCode : int { exit_ok = 0, exit_assertion = 1, exit_solver = 2, exit_config = 3 };

struct RunConfig {
    std::string experiment = "eval";
    DomainSpec domain;
    EllipticityPair ell;
    std::optional<NonlinearitySpec> nl;
    double h = 1.0 / 32.0;
    std::uint64_t seed = 42;
    std::string out_dir = "results";
    int workers = 1;
    std::map<std::string, std::string> overrides;
    Config params;  ///< every resolved key, defaults included

    /// Validated config from raw key/values (file plus overrides).
    static RunConfig from_config(const Config& raw, const std::map<std::string, std::string>& overrides = {});

    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
};

/// One headline number with its numerical error bar.
struct ScalarResult {
    std::string name;
    double value = 0.0;
    double error = 0.0;
    std::string units;
};

/// Verification outcome; a pass on a margin check needs margin > 3 error.
struct Assertion {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    double error = 0.0;
    std::string detail;
    bool skipped = false;
};

struct Snapshot2D {
    std::string name;
    ScalarField field;
};

struct RunRecord {
    std::string experiment;
    std::map<std::string, std::string> config;
    std::vector<ScalarResult> results;
    std::vector<Assertion> assertions;
    nlohmann::json reports = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    std::map<std::string, double> timings_ms;
    std::vector<Snapshot2D> snapshots;
    std::map<std::string, std::string> files;  ///< extra text outputs (file name -> content)
    std::vector<std::string> notes;
    int status = exit_ok;
    std::string message;
    std::string run_dir;

    void add(std::string name, double value, double error = 0.0, std::string units = "");
    const ScalarResult* find(const std::string& name) const;
    void check(std::string name, bool passed, double margin, double error, std::string detail = "");
    /// Margin check with the 3x error rule.
    void check_margin(std::string name, double margin, double error, std::string detail = "");
    bool all_passed() const;

    /// Deterministic section: everything except timings and paths.
    nlohmann::json scalar_json() const;
    nlohmann::json to_json() const;
};

/// Dispatches to the configured experiment. Solver failures are caught and
/// recorded with status exit_solver; the record is not written to disk.
RunRecord run(const RunConfig& cfg);

/// Runs and persists under out_dir/<experiment>/<timestamp>-<seed>/.
RunRecord run_and_write(const RunConfig& cfg);

RunRecord verify_paper_suite(const std::string& name, const RunConfig& cfg);

struct SweepResult {
    std::vector<RunRecord> runs;
    std::vector<double> values;
    std::string summary_csv;
};

/// Independent runs over `values` of a numeric key, executed by up to
/// cfg.workers threads. With `write` set each run persists below the sweep
/// directory.
SweepResult sweep(const RunConfig& base, const std::string& axis, const std::vector<double>& values,
                  bool write = false);

/// CSV rows `name,value,error,units`.
std::string results_csv(const RunRecord& r);

/// Directory writer used by run_and_write; returns the created directory.
std::string write_record(RunRecord& r, const std::string& parent, std::uint64_t seed);

nlohmann::json to_json(const FssReport& r);
nlohmann::json to_json(const NodalReport& r);
nlohmann::json to_json(const NonlinearitySpec& nl);
nlohmann::json to_json(const FamilyEstimate& f);

/// Default output root: PUCCI_SPECTRA_OUT when set, else `results`.
std::string default_out_dir();

}  // namespace pucci
