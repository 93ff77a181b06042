#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "degen/benchmarks.hpp"
#include "degen/continuation.hpp"

namespace degen {

inline constexpr const char* kToolName = "degenlab";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitStructural = 3,
    kExitSolver = 4,
    kExitVerification = 5,
};

struct RunConfig {
    std::optional<std::filesystem::path> problem_file;
    std::optional<std::string> benchmark;
    BenchmarkParams bench_params;
    int nx = 128;
    int ny = 128;
    std::optional<double> eps0;
    std::optional<double> eps_ratio;
    std::optional<double> eps_floor;  ///< default max(1e-5, hy)
    std::optional<double> cauchy_tolerance;
    Scheme scheme = Scheme::Central;
    double omega_star = 1e-3;
    int threads = 1;
    bool override_structural = false;
    int residual_tests = 25;
    std::filesystem::path out = "out";

    /// Throws ConfigError for non-positive sizes or tolerances, or a missing source.
    void validate() const;
};

struct PipelineResult {
    int exit_code = kExitOk;
    std::string message;
    nlohmann::ordered_json summary;  ///< report.json (solve) or verdict.json (verify)
};

/// Resolves the problem, checks the structural conditions, runs the eps
/// continuation on both sides, glues, and writes the bundle:
///     manifest.json problem.json structural.json report.json
///     fields/<side>_<k>.{bin,mask,json} (every iterate), u.{bin,mask,json} (glued)
/// Never throws; failures map to the exit codes.
[[nodiscard]] PipelineResult run_solve(const RunConfig& config);

/// Reads a solve bundle and writes estimates_<side>.csv and verdict.json.
[[nodiscard]] PipelineResult run_verify(const std::filesystem::path& dir, int residual_tests = 25);

/// Solve followed by verify in the same directory.
[[nodiscard]] PipelineResult run_pipeline(const RunConfig& config);

/// Canonical transform of a domain problem: transform.json, coefficients.csv, b0.csv.
[[nodiscard]] PipelineResult run_transform_command(const RunConfig& config, int csv_nx = 64, int csv_ny = 32);

}  // namespace degen
