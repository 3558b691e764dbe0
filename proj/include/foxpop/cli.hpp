/*! @file cli.hpp
    @brief Subcommands of the `foxpop` executable.

    Exit statuses: 0 success, 2 invalid configuration or input,
    3 I/O failure, 4 calibration outside tolerance.
*/
#pragma once

#include "foxpop/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace foxpop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitCalibration = 4;

inline constexpr std::string_view kVersion = "1.0.0";

struct RunOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out{"."};
    bool trajectories{false};
};

struct SweepOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::string> axis;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out{"."};
    unsigned workers{0};
    bool trajectories{false};
};

struct EstimateOptions {
    std::filesystem::path cohort;
    std::string method{"bayes"};
    std::optional<std::filesystem::path> out;
};

struct CalibrateOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path targets;
    std::filesystem::path out;
    SearchSpace search{};
    std::optional<double> tolerance_points;
};

//! Seed from the FOXPOP_SEED environment variable, if set and valid.
std::optional<std::uint64_t> env_seed();

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_estimate(const EstimateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_calibrate(const CalibrateOptions& opts, std::ostream& out, std::ostream& err);

//! Parses argv and dispatches to a subcommand.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace foxpop::cli
