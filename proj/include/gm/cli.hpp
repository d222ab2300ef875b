#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace gm::cli {

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;    // parse/validation failures
inline constexpr int kExitNumeric = 3;  // internal numeric failures

struct CommonOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_dir = ".";
    double threshold = 0.6;
    double min_run_seconds = 1.0;
    std::uint64_t seed = 1;
    std::string test = "auto";  // student|welch|auto; used by analyze
    bool to_stdout = false;
};

int run_measures(const CommonOptions& opts);
int run_evaluate(const CommonOptions& opts);

struct AnalyzeOptions : CommonOptions {
    // reproduce the published comparisons from a summary-statistics fixture
    std::optional<std::filesystem::path> summary_fixture;
};

int run_analyze(const AnalyzeOptions& opts);

struct PredictOptions : CommonOptions {
    int n_bootstrap = 1000;
    std::optional<std::filesystem::path> config;  // hyperparameter overrides (JSON)
};

int run_predict(const PredictOptions& opts);

struct SynthOptions {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> config;  // cohort config (JSON)
    bool to_stdout = false;
    // accepted for interface uniformity; generation reads its config file
    double threshold = 0.6;
    double min_run_seconds = 1.0;
    std::string test = "auto";
};

int run_synth(const SynthOptions& opts);

// full argv dispatcher used by the gm binary
int dispatch(int argc, char** argv);

}  // namespace gm::cli
