/*! @file engine.hpp
    @brief Annual step composition, full runs with stopping rules, and the
           growth-rate statistic.
*/
#pragma once

#include "foxpop/core.hpp"
#include "foxpop/lifecycle.hpp"
#include "foxpop/rng.hpp"
#include "foxpop/survival.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace foxpop {

//! Invalid model, initialization or experiment configuration. @c path names
//! the offending field, e.g. "init.prop_*".
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

enum class FoodLevel : std::uint8_t { Poor, Medium, Rich };

//! Location and food level of a territory. Carried through configuration
//! but not used by any phase.
struct RangeAttributes {
    double x{};
    double y{};
    FoodLevel food{FoodLevel::Medium};
    friend bool operator==(const RangeAttributes&, const RangeAttributes&) = default;
};

//! Survival probabilities calibrated against the reported outcome fractions
//! (see config/default.json for the achieved-vs-target report).
SurvivalTable default_survival_table();

struct ModelParams {
    int num_ranges{60};
    ReproParams repro{};
    SurvivalTable survival{default_survival_table()};
    int max_age{kMaxAge};
    std::size_t extinction_threshold{10};
    std::size_t max_population{500};
    int horizon{50};
    int burn_in{3};
    //! Empty, or one entry per range.
    std::vector<RangeAttributes> range_attributes;

    //! Throws ConfigError.
    void validate() const;
    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct InitParams {
    //! Yearlings plus adults at t = 0.
    int n0{120};
    double prop_adult{0.24};
    double prop_yearling{0.15};
    double prop_cub{0.61};
    int adult_age_min{2};
    int adult_age_max{8};

    //! Throws ConfigError.
    void validate() const;
    friend bool operator==(const InitParams&, const InitParams&) = default;
};

struct InitialComposition {
    int adults{};
    int yearlings{};
    int cubs{};
};

//! The proportions describe the whole population; n0 covers only yearlings
//! and adults, so adults = round(n0 pa / (pa + py)), yearlings = n0 - adults,
//! cubs = round(n0 pc / (pa + py)).
InitialComposition initial_composition(const InitParams& init);

struct YearRecord {
    int year{};
    std::size_t n_non_cub{};
    std::size_t n_cubs{};
    std::size_t n_yearlings{};
    std::size_t n_adults{};
    friend bool operator==(const YearRecord&, const YearRecord&) = default;
};

YearRecord record_year(const PopulationState& state);

enum class Outcome : std::uint8_t { Extinct, MaxLimit, HorizonReached };

std::string_view to_string(Outcome o) noexcept;   // "extinct", "max_limit", "horizon"
std::optional<Outcome> parse_outcome(std::string_view s) noexcept;

struct RunResult {
    std::uint64_t seed{};
    //! trajectory[0] is the state right after initialization.
    std::vector<YearRecord> trajectory;
    Outcome outcome{Outcome::HorizonReached};
    std::optional<double> lambda;
    //! Summed over all simulated years.
    std::size_t deaths{}, births{}, moves{}, eliminations{};

    int years() const noexcept { return trajectory.empty() ? 0 : trajectory.back().year; }
    std::size_t final_n() const noexcept {
        return trajectory.empty() ? 0 : trajectory.back().n_non_cub;
    }
    friend bool operator==(const RunResult&, const RunResult&) = default;
};

//! Builds the t = 0 population. Throws ConfigError if @p num_ranges < 1.
PopulationState init_population(const InitParams& init, int num_ranges, Rng& rng);

//! survival -> aging -> dispersal -> reproduction, then year += 1.
PhaseEvents step_year(PopulationState& state, const ModelParams& params, Rng& rng);

//! Outcome if the run stops at @p n_non_cub, or nullopt if it continues.
std::optional<Outcome> stopping_outcome(const ModelParams& params, std::size_t n_non_cub,
                                        int year) noexcept;

/*! One full run from a fresh population seeded with @p seed. Stops after the
    year in which the non-cub count falls below extinction_threshold, reaches
    max_population, or the horizon is reached. The same check is applied to
    the initial population.
*/
RunResult run_simulation(const ModelParams& params, const InitParams& init, std::uint64_t seed);

//! Mean of (n[t+1] - n[t]) / n[t] over t >= burn_in, on non-cub counts. The
//! window ends at the first n[t] = 0. nullopt when fewer than one rate is
//! usable.
std::optional<double> compute_lambda(std::span<const std::size_t> n, int burn_in);
std::optional<double> compute_lambda(std::span<const YearRecord> trajectory, int burn_in);

}  // namespace foxpop
