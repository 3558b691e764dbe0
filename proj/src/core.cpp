#include "foxpop/core.hpp"

#include <numeric>

namespace foxpop {

std::string_view to_string(Sex s) noexcept { return s == Sex::Female ? "f" : "m"; }

std::string_view to_string(AgeClass a) noexcept {
    switch (a) {
    case AgeClass::Cub: return "cub";
    case AgeClass::Yearling: return "yearling";
    case AgeClass::Adult: return "adult";
    }
    return "?";
}

AgeClass classify_age(int age) {
    if (age < 0 || age > kMaxAge)
        throw ContractError("classify_age: age " + std::to_string(age) + " outside [0, " +
                            std::to_string(kMaxAge) + "]");
    if (age == 0) return AgeClass::Cub;
    if (age == 1) return AgeClass::Yearling;
    return AgeClass::Adult;
}

void HomeRange::add(Sex s) noexcept {
    ++n_total;
    if (s == Sex::Male)
        ++n_male;
    else
        ++n_female;
}

void HomeRange::remove(Sex s) noexcept {
    --n_total;
    if (s == Sex::Male)
        --n_male;
    else
        --n_female;
}

PopulationState::PopulationState(std::size_t num_ranges) : ranges(num_ranges) {
    for (std::size_t j = 0; j < num_ranges; ++j)
        ranges[j].id = RangeId{static_cast<std::uint32_t>(j)};
}

Agent& PopulationState::add_agent(Sex sex, int age, RangeId home_range) {
    if (home_range.value >= ranges.size())
        throw ContractError("add_agent: range " + std::to_string(home_range.value) +
                            " does not exist");
    Agent& a = agents.emplace_back(Agent{next_id++, sex, age, false, home_range});
    if (!a.is_cub()) range(home_range).add(sex);
    return a;
}

void rebuild_counts(PopulationState& state) {
    for (auto& r : state.ranges) r.n_total = r.n_male = r.n_female = 0;
    for (const auto& a : state.agents)
        if (!a.is_cub()) state.range(a.home_range).add(a.sex);
}

PopulationState rebuilt(PopulationState state) {
    rebuild_counts(state);
    return state;
}

std::size_t count_non_cubs(const PopulationState& state) noexcept {
    std::size_t n = 0;
    for (const auto& a : state.agents)
        if (!a.is_cub()) ++n;
    return n;
}

std::size_t cached_total(const PopulationState& state) noexcept {
    return std::accumulate(state.ranges.begin(), state.ranges.end(), std::size_t{0},
                           [](std::size_t acc, const HomeRange& r) { return acc + r.n_total; });
}

bool counts_consistent(const PopulationState& state) {
    return rebuilt(state).ranges == state.ranges;
}

}  // namespace foxpop
