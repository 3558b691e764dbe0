#include "foxpop/engine.hpp"

#include <cmath>

namespace foxpop {

SurvivalTable default_survival_table() {
    // Output of `foxpop calibrate` with config/targets_cub_survival.csv; both sexes equal.
    return SurvivalTable::by_age_class(0.703125, 0.975, 0.125);
}

namespace {

void require(bool ok, const char* path, const char* message) {
    if (!ok) throw ConfigError(path, message);
}

}  // namespace

void ModelParams::validate() const {
    require(num_ranges >= 1, "model.num_ranges", "must be >= 1");
    try {
        repro.validate();
    } catch (const ContractError& e) {
        const std::string what = e.what();
        throw ConfigError("model." + what.substr(0, what.find(' ')), what);
    }
    require(max_age >= 1 && max_age <= kMaxAge, "model.max_age", "must lie in [1, 12]");
    require(extinction_threshold < max_population, "model.extinction_threshold",
            "must be below model.max_population");
    require(burn_in >= 0, "model.burn_in", "must be >= 0");
    require(horizon > burn_in, "model.horizon", "must exceed model.burn_in");
    require(range_attributes.empty() ||
                range_attributes.size() == static_cast<std::size_t>(num_ranges),
            "model.ranges", "must be empty or list one entry per range");
}

void InitParams::validate() const {
    require(n0 >= 0, "init.n0", "must be >= 0");
    for (double p : {prop_adult, prop_yearling, prop_cub})
        require(p >= 0.0 && p <= 1.0, "init.prop_*", "proportions must lie in [0, 1]");
    require(std::abs(prop_adult + prop_yearling + prop_cub - 1.0) <= 1e-9, "init.prop_*",
            "prop_adult + prop_yearling + prop_cub must equal 1");
    require(prop_adult + prop_yearling > 0.0, "init.prop_*",
            "prop_adult + prop_yearling must be positive");
    require(adult_age_min >= 2 && adult_age_min <= adult_age_max && adult_age_max <= kMaxAge,
            "init.adult_age_min", "adult ages must satisfy 2 <= min <= max <= 12");
}

InitialComposition initial_composition(const InitParams& init) {
    const double breeders = init.prop_adult + init.prop_yearling;
    InitialComposition c;
    c.adults = static_cast<int>(std::lround(init.n0 * init.prop_adult / breeders));
    c.yearlings = init.n0 - c.adults;
    c.cubs = static_cast<int>(std::lround(init.n0 * init.prop_cub / breeders));
    return c;
}

YearRecord record_year(const PopulationState& state) {
    YearRecord r;
    r.year = state.year;
    for (const Agent& a : state.agents) {
        switch (a.age_class()) {
        case AgeClass::Cub: ++r.n_cubs; break;
        case AgeClass::Yearling: ++r.n_yearlings; break;
        case AgeClass::Adult: ++r.n_adults; break;
        }
    }
    r.n_non_cub = r.n_yearlings + r.n_adults;
    return r;
}

std::string_view to_string(Outcome o) noexcept {
    switch (o) {
    case Outcome::Extinct: return "extinct";
    case Outcome::MaxLimit: return "max_limit";
    case Outcome::HorizonReached: return "horizon";
    }
    return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) noexcept {
    for (Outcome o : {Outcome::Extinct, Outcome::MaxLimit, Outcome::HorizonReached})
        if (s == to_string(o)) return o;
    return std::nullopt;
}

PopulationState init_population(const InitParams& init, int num_ranges, Rng& rng) {
    if (num_ranges < 1) throw ConfigError("model.num_ranges", "must be >= 1");
    init.validate();
    PopulationState state(static_cast<std::size_t>(num_ranges));
    const InitialComposition c = initial_composition(init);
    auto place = [&](int age) {
        const Sex sex = bernoulli(rng, 0.5) ? Sex::Female : Sex::Male;
        const auto range = static_cast<std::uint32_t>(uniform_index(rng, state.ranges.size()));
        state.add_agent(sex, age, RangeId{range});
    };
    for (int i = 0; i < c.adults; ++i)
        place(static_cast<int>(uniform_int(rng, init.adult_age_min, init.adult_age_max)));
    for (int i = 0; i < c.yearlings; ++i) place(1);
    for (int i = 0; i < c.cubs; ++i) place(0);
    return state;
}

PhaseEvents step_year(PopulationState& state, const ModelParams& params, Rng& rng) {
    PhaseEvents ev = survival_phase(state, params.survival, rng);
    ev.append(aging_phase(state, params.max_age));
    ev.append(dispersal_phase(state, rng));
    ev.append(reproduction_phase(state, params.repro, rng));
    ++state.year;
    return ev;
}

std::optional<Outcome> stopping_outcome(const ModelParams& params, std::size_t n_non_cub,
                                        int year) noexcept {
    if (n_non_cub < params.extinction_threshold) return Outcome::Extinct;
    if (n_non_cub >= params.max_population) return Outcome::MaxLimit;
    if (year >= params.horizon) return Outcome::HorizonReached;
    return std::nullopt;
}

RunResult run_simulation(const ModelParams& params, const InitParams& init, std::uint64_t seed) {
    params.validate();
    Rng rng(seed);
    RunResult result;
    result.seed = seed;
    PopulationState state = init_population(init, params.num_ranges, rng);
    result.trajectory.push_back(record_year(state));
    while (true) {
        const YearRecord& last = result.trajectory.back();
        if (auto outcome = stopping_outcome(params, last.n_non_cub, last.year)) {
            result.outcome = *outcome;
            break;
        }
        const PhaseEvents ev = step_year(state, params, rng);
        result.deaths += ev.deaths;
        result.births += ev.births;
        result.moves += ev.moves.size();
        result.eliminations += ev.eliminations_over_age;
        result.trajectory.push_back(record_year(state));
    }
    result.lambda = compute_lambda(std::span<const YearRecord>(result.trajectory), params.burn_in);
    return result;
}

std::optional<double> compute_lambda(std::span<const std::size_t> n, int burn_in) {
    if (burn_in < 0) burn_in = 0;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = static_cast<std::size_t>(burn_in); t + 1 < n.size(); ++t) {
        if (n[t] == 0) break;
        const double now = static_cast<double>(n[t]);
        sum += (static_cast<double>(n[t + 1]) - now) / now;
        ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

std::optional<double> compute_lambda(std::span<const YearRecord> trajectory, int burn_in) {
    std::vector<std::size_t> n;
    n.reserve(trajectory.size());
    for (const YearRecord& r : trajectory) n.push_back(r.n_non_cub);
    return compute_lambda(std::span<const std::size_t>(n), burn_in);
}

}  // namespace foxpop
