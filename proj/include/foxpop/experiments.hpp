/*! @file experiments.hpp
    @brief One-at-a-time parameter sweeps, outcome aggregation, calibration of
           the default survival table, and the critical-mass estimator.
*/
#pragma once

#include "foxpop/engine.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace foxpop {

enum class SweepAxis : std::uint8_t { InitialN, CubSurvival, YearlingSurvival, AdultSurvival };

//! "initial-n", "cub-survival", "yearling-survival", "adult-survival".
std::string_view to_string(SweepAxis axis) noexcept;
std::optional<SweepAxis> parse_axis(std::string_view name) noexcept;
//! Age class shifted by a survival axis. ContractError for InitialN.
AgeClass axis_age_class(SweepAxis axis);

//! n0 = 20, 70, ..., 470 for InitialN; deltas -0.2, -0.15, ..., +0.2 otherwise.
std::vector<double> default_axis_values(SweepAxis axis);

inline constexpr std::uint64_t kDefaultBaseSeed = 20190101;

struct SweepSpec {
    SweepAxis axis{SweepAxis::CubSurvival};
    std::vector<double> values{default_axis_values(SweepAxis::CubSurvival)};
    int runs_per_scenario{100};
    std::uint64_t base_seed{kDefaultBaseSeed};

    //! Throws ConfigError.
    void validate() const;
};

//! "<axis>:<value>", e.g. "cub-survival:0.05".
std::string scenario_label(SweepAxis axis, double value);

//! Parameters of one scenario: n0 replaced, or the survival table shifted for
//! both sexes of one age class.
void apply_scenario(SweepAxis axis, double value, ModelParams& params, InitParams& init);

//! One row of the per-run CSV.
struct RunRecord {
    std::string scenario;
    double axis_value{};
    int run_index{};
    std::uint64_t seed{};
    Outcome outcome{};
    int years{};
    std::optional<double> lambda;
    std::size_t final_n{};
    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct ScenarioStats {
    std::string scenario;
    double axis_value{};
    std::size_t n_runs{};
    double pct_extinct{};
    double pct_max_limit{};
    std::optional<double> lambda_mean;
    std::optional<double> lambda_median;
    //! Sample standard deviation; 0 for a single defined value.
    std::optional<double> lambda_std;
    friend bool operator==(const ScenarioStats&, const ScenarioStats&) = default;
};

//! Outcome fractions and lambda statistics of one scenario. Lambda statistics
//! use only runs with a defined lambda. Throws ContractError when empty.
ScenarioStats aggregate(std::span<const RunRecord> runs);

//! aggregate() over each maximal block of consecutive records sharing a
//! scenario label, in input order.
std::vector<ScenarioStats> aggregate_by_scenario(std::span<const RunRecord> runs);

struct TrajectoryEntry {
    std::string scenario;
    int run_index{};
    std::vector<YearRecord> trajectory;
};

struct SweepResult {
    //! Scenario-major, then run index.
    std::vector<RunRecord> runs;
    std::vector<ScenarioStats> stats;
    //! Filled only when requested.
    std::vector<TrajectoryEntry> trajectories;
};

//! Calls @p body(i) for i in [0, n) on up to @p workers threads (0 = hardware
//! concurrency). Exceptions from @p body are rethrown on the calling thread.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

//! Run j of scenario i uses derive_seed(spec.base_seed, i, j).
SweepResult run_sweep(const SweepSpec& spec, const ModelParams& base_params,
                      const InitParams& init, unsigned workers = 0,
                      bool keep_trajectories = false);

//! CSV text for the per-run, per-scenario and trajectory files.
std::string runs_csv(std::span<const RunRecord> runs);
std::string scenarios_csv(std::span<const ScenarioStats> stats);
std::string trajectories_csv(std::span<const TrajectoryEntry> trajectories);
//! Parses runs_csv() output. Throws std::invalid_argument on malformed rows.
std::vector<RunRecord> parse_runs_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationRow {
    SweepAxis axis{SweepAxis::CubSurvival};
    double delta{};
    double pct_extinct{};
    double pct_max_limit{};
};

struct CalibrationTarget {
    std::vector<CalibrationRow> rows;
    //! Allowed absolute error per fraction, in percentage points.
    double tolerance_points{10.0};
};

//! Reported baseline (99% extinct at the defaults) and the cub-survival
//! column of the extinct / max-limit table.
CalibrationTarget reported_cub_targets();

//! Reads `axis,delta,pct_extinct,pct_max_limit` rows (fractions in [0, 1]).
//! Throws ConfigError on malformed content, IoError if unreadable.
CalibrationTarget read_targets_csv(std::istream& in);

/*! Grid-plus-refine search over tables with equal survival for both sexes.

    A coarse grid over [lo, hi]^3 (cub, yearling, adult) is scored with
    coarse_runs runs per target row. Each (yearling, adult) pair then keeps
    its best cub value, refined cub_refine_levels times by halving the cub
    step. The best @c keep candidates are refined refine_levels more times by
    halving every step and scoring the 3x3x3 neighbourhood of each with
    refine_runs runs. All candidates share the same seeds (run j of row i
    uses derive_seed(base_seed, i, j)).
*/
struct SearchSpace {
    double lo{0.1};
    double hi{1.0};
    double coarse_step{0.1};
    int coarse_runs{20};
    //! Extinction responds far more sharply to cub survival than to the other
    //! classes, so each (yearling, adult) pair gets its own cub line search.
    int cub_refine_levels{3};
    int refine_levels{2};
    int refine_runs{100};
    std::size_t keep{4};
    std::uint64_t base_seed{kDefaultBaseSeed + 1};
    unsigned workers{0};

    void validate() const;
};

struct RowFit {
    CalibrationRow target;
    double achieved_extinct{};
    double achieved_max_limit{};
    bool within_tolerance{};
};

struct CandidateScore {
    SurvivalTable table;
    //! Squared error summed over both fractions of every row.
    double sse{};
    int runs_per_row{};
    std::vector<RowFit> fits;
};

struct CalibrationResult {
    CandidateScore best;
    bool within_tolerance{};
    std::size_t candidates_evaluated{};
};

//! Scores one table against the target rows with @p runs runs per row.
CandidateScore score_candidate(const SurvivalTable& table, const CalibrationTarget& target,
                               const ModelParams& base_params, const InitParams& init, int runs,
                               std::uint64_t base_seed, unsigned workers = 0);

CalibrationResult calibrate_defaults(const CalibrationTarget& target, const SearchSpace& space,
                                     const ModelParams& base_params, const InitParams& init);

//! Smallest n0 whose extinction fraction falls below one half, scanning
//! @p initial_n_stats in increasing axis_value order; nullopt if none does.
std::optional<double> detect_critical_mass(std::span<const ScenarioStats> initial_n_stats);

}  // namespace foxpop
