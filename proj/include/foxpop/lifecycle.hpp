/*! @file lifecycle.hpp
    @brief The annual phases: winter survival, aging, dispersal and
           reproduction.

    Each phase mutates a PopulationState in place, keeps the cached range
    counts current, and draws all randomness from the caller's stream.
    Agents are visited in a freshly shuffled order in every phase.
*/
#pragma once

#include "foxpop/core.hpp"
#include "foxpop/rng.hpp"
#include "foxpop/survival.hpp"

#include <cstddef>
#include <vector>

namespace foxpop {

struct ReproParams {
    double p_repro_adult{0.5};
    double p_repro_yearling{0.1};
    double litter_mean{4.0};
    double litter_sd{1.0};
    double p_sex_female{0.5};

    //! Throws ContractError naming the first invalid field.
    void validate() const;
    friend bool operator==(const ReproParams&, const ReproParams&) = default;
};

struct Move {
    AgentId agent{};
    RangeId from{};
    RangeId to{};
    friend bool operator==(const Move&, const Move&) = default;
};

struct Litter {
    AgentId mother{};
    RangeId range{};
    int size{};
    friend bool operator==(const Litter&, const Litter&) = default;
};

//! One residency decision, in visiting order. to == from for residents.
struct DispersalDecision {
    AgentId agent{};
    RangeId from{};
    RangeId to{};
    bool resident{};
    friend bool operator==(const DispersalDecision&, const DispersalDecision&) = default;
};

struct PhaseEvents {
    std::size_t deaths{};
    std::size_t eliminations_over_age{};
    std::size_t births{};
    std::vector<Move> moves;
    std::vector<Litter> litters;
    std::vector<DispersalDecision> dispersal_log;

    void append(const PhaseEvents& other);
    friend bool operator==(const PhaseEvents&, const PhaseEvents&) = default;
};

//! Each agent survives with probability table(age class, sex); the rest are removed.
PhaseEvents survival_phase(PopulationState& state, const SurvivalTable& table, Rng& rng);

//! Every agent ages one year; agents older than @p max_age are eliminated.
//! Cubs turning one start counting toward their range's occupancy.
PhaseEvents aging_phase(PopulationState& state, int max_age = kMaxAge);

/*! Residency check and forced relocation of floaters.

    An adult with at least one opposite-sex animal in its range becomes a
    resident and stays. Every other agent becomes a floater and leaves:
    it is taken out of its range's counts, then moves to a uniformly chosen
    range that holds the opposite sex but not its own sex; if there is none,
    to a uniformly chosen range of minimal total occupancy. The origin range is
    never a destination unless it is the only range. Counts are updated
    before the next agent is visited. Cubs are skipped.
*/
PhaseEvents dispersal_phase(PopulationState& state, Rng& rng);

//! Ranges a floater of @p sex leaving @p origin may move to, given the current
//! counts (which must already exclude the floater). Sets @p mate_rule to true
//! when the set came from the opposite-sex rule, false for the minimum-occupancy
//! fallback.
std::vector<RangeId> dispersal_candidates(const PopulationState& state, Sex sex, RangeId origin,
                                          bool* mate_rule = nullptr);

//! max(0, round-half-away-from-zero(Normal(litter_mean, litter_sd))).
int draw_litter_size(const ReproParams& params, Rng& rng);

//! Yearling and adult females sharing a range with at least one male breed
//! with the age-specific probability. Newborn cubs stay in the mother's range
//! and are not counted in occupancy.
PhaseEvents reproduction_phase(PopulationState& state, const ReproParams& params, Rng& rng);

}  // namespace foxpop
