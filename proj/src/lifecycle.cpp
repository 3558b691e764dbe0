#include "foxpop/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace foxpop {

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span(order), rng);
    return order;
}

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ContractError(std::string("repro.") + name + " must lie in [0, 1]");
}

}  // namespace

void ReproParams::validate() const {
    check_probability(p_repro_adult, "p_adult");
    check_probability(p_repro_yearling, "p_yearling");
    check_probability(p_sex_female, "p_sex_female");
    if (!std::isfinite(litter_mean)) throw ContractError("repro.litter_mean must be finite");
    if (!(litter_sd >= 0.0) || !std::isfinite(litter_sd))
        throw ContractError("repro.litter_sd must be finite and >= 0");
}

void PhaseEvents::append(const PhaseEvents& other) {
    deaths += other.deaths;
    eliminations_over_age += other.eliminations_over_age;
    births += other.births;
    moves.insert(moves.end(), other.moves.begin(), other.moves.end());
    litters.insert(litters.end(), other.litters.begin(), other.litters.end());
    dispersal_log.insert(dispersal_log.end(), other.dispersal_log.begin(),
                         other.dispersal_log.end());
}

PhaseEvents survival_phase(PopulationState& state, const SurvivalTable& table, Rng& rng) {
    PhaseEvents ev;
    std::vector<char> dead(state.agents.size(), 0);
    for (std::size_t i : shuffled_indices(state.agents.size(), rng)) {
        const Agent& a = state.agents[i];
        if (bernoulli(rng, table(a.age_class(), a.sex))) continue;
        dead[i] = 1;
        ++ev.deaths;
        if (!a.is_cub()) state.range(a.home_range).remove(a.sex);
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < state.agents.size(); ++i)
        if (!dead[i]) state.agents[kept++] = state.agents[i];
    state.agents.resize(kept);
    return ev;
}

PhaseEvents aging_phase(PopulationState& state, int max_age) {
    PhaseEvents ev;
    std::size_t kept = 0;
    for (Agent& a : state.agents) {
        const bool was_cub = a.is_cub();
        ++a.age;
        if (a.age > max_age) {
            ++ev.eliminations_over_age;
            if (!was_cub) state.range(a.home_range).remove(a.sex);
            continue;
        }
        if (was_cub) state.range(a.home_range).add(a.sex);
        state.agents[kept++] = a;
    }
    state.agents.resize(kept);
    return ev;
}

std::vector<RangeId> dispersal_candidates(const PopulationState& state, Sex sex, RangeId origin,
                                          bool* mate_rule) {
    std::vector<RangeId> out;
    if (state.ranges.size() == 1) {
        if (mate_rule) *mate_rule = false;
        out.push_back(origin);
        return out;
    }
    const Sex other = opposite(sex);
    for (const HomeRange& r : state.ranges)
        if (r.id != origin && r.count(other) > 0 && r.count(sex) == 0) out.push_back(r.id);
    if (!out.empty()) {
        if (mate_rule) *mate_rule = true;
        return out;
    }
    if (mate_rule) *mate_rule = false;
    auto least = std::numeric_limits<std::uint32_t>::max();
    for (const HomeRange& r : state.ranges) {
        if (r.id == origin) continue;
        if (r.n_total < least) {
            least = r.n_total;
            out.clear();
        }
        if (r.n_total == least) out.push_back(r.id);
    }
    return out;
}

PhaseEvents dispersal_phase(PopulationState& state, Rng& rng) {
    PhaseEvents ev;
    for (std::size_t i : shuffled_indices(state.agents.size(), rng)) {
        Agent& a = state.agents[i];
        if (a.is_cub()) continue;
        HomeRange& home = state.range(a.home_range);
        if (a.age_class() == AgeClass::Adult && home.count(opposite(a.sex)) > 0) {
            a.resident = true;
            ev.dispersal_log.push_back({a.id, a.home_range, a.home_range, true});
            continue;
        }
        a.resident = false;
        const RangeId from = a.home_range;
        home.remove(a.sex);
        const auto candidates = dispersal_candidates(state, a.sex, from);
        const RangeId to = candidates[uniform_index(rng, candidates.size())];
        state.range(to).add(a.sex);
        a.home_range = to;
        ev.moves.push_back({a.id, from, to});
        ev.dispersal_log.push_back({a.id, from, to, false});
    }
    return ev;
}

int draw_litter_size(const ReproParams& params, Rng& rng) {
    const double x = std::round(normal(rng, params.litter_mean, params.litter_sd));
    if (!(x > 0.0)) return 0;
    constexpr double kCap = 1e6;
    return static_cast<int>(std::min(x, kCap));
}

PhaseEvents reproduction_phase(PopulationState& state, const ReproParams& params, Rng& rng) {
    PhaseEvents ev;
    std::vector<std::size_t> mothers;
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
        const Agent& a = state.agents[i];
        if (a.sex != Sex::Female || a.is_cub()) continue;
        if (state.range(a.home_range).n_male > 0) mothers.push_back(i);
    }
    shuffle(std::span(mothers), rng);
    for (std::size_t i : mothers) {
        const AgentId mother = state.agents[i].id;
        const RangeId home = state.agents[i].home_range;
        const double p = state.agents[i].age_class() == AgeClass::Adult ? params.p_repro_adult
                                                                        : params.p_repro_yearling;
        if (!bernoulli(rng, p)) continue;
        const int size = draw_litter_size(params, rng);
        for (int c = 0; c < size; ++c) {
            const Sex s = bernoulli(rng, params.p_sex_female) ? Sex::Female : Sex::Male;
            state.add_agent(s, 0, home);
        }
        ev.births += static_cast<std::size_t>(size);
        ev.litters.push_back({mother, home, size});
    }
    return ev;
}

}  // namespace foxpop
