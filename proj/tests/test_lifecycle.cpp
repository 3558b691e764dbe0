#include "foxpop/lifecycle.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace foxpop;

namespace {

RangeId R(std::uint32_t j) { return RangeId{j}; }

std::map<AgentId, Agent> by_id(const PopulationState& s) {
    std::map<AgentId, Agent> out;
    for (const Agent& a : s.agents) out[a.id] = a;
    return out;
}

PopulationState random_adult_state(Rng& rng, std::size_t ranges, int n) {
    PopulationState s(ranges);
    for (int i = 0; i < n; ++i)
        s.add_agent(bernoulli(rng, 0.5) ? Sex::Female : Sex::Male,
                    static_cast<int>(uniform_int(rng, 1, 12)),
                    R(static_cast<std::uint32_t>(uniform_index(rng, ranges))));
    return s;
}

// P(round-half-away(N(mean, sd)) = k) for integer k.
double p_rounded(int k, double mean, double sd) {
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0))); };
    return cdf(k + 0.5) - cdf(k - 0.5);
}

}  // namespace

TEST_SUITE("lifecycle") {

TEST_CASE("certain survival and certain death") {
    Rng rng(1);
    PopulationState s = random_adult_state(rng, 10, 200);
    s.add_agent(Sex::Female, 0, R(2));
    const auto before = s.agents;
    const auto ev = survival_phase(s, SurvivalTable::uniform(1.0), rng);
    CHECK(ev.deaths == 0);
    CHECK(s.agents.size() == before.size());
    CHECK(counts_consistent(s));

    survival_phase(s, SurvivalTable::uniform(0.0), rng);
    CHECK(s.agents.empty());
    CHECK(cached_total(s) == 0);
}

TEST_CASE("surviving fraction follows the binomial") {
    Rng rng(99);
    PopulationState s(60);
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        s.add_agent(i % 2 ? Sex::Male : Sex::Female, 5, R(static_cast<std::uint32_t>(i % 60)));
    survival_phase(s, SurvivalTable::uniform(0.7), rng);
    const double frac = static_cast<double>(s.agents.size()) / n;
    const double sigma = std::sqrt(0.7 * 0.3 / n);
    CHECK(std::abs(frac - 0.7) < 3 * sigma);
    CHECK(counts_consistent(s));
}

TEST_CASE("survival uses the agent's own cell") {
    Rng rng(3);
    PopulationState s(4);
    for (int i = 0; i < 50; ++i) {
        s.add_agent(Sex::Female, 0, R(0));
        s.add_agent(Sex::Male, 0, R(0));
        s.add_agent(Sex::Female, 1, R(1));
        s.add_agent(Sex::Male, 3, R(2));
    }
    const SurvivalTable t({1.0, 0.0, 0.0, 1.0, 1.0, 0.0});  // cub f, yearling m, adult f live
    survival_phase(s, t, rng);
    for (const Agent& a : s.agents) CHECK((a.age == 0 && a.sex == Sex::Female));
    CHECK(s.agents.size() == 50);
}

TEST_CASE("survival never changes ages or ranges") {
    Rng rng(8);
    PopulationState s = random_adult_state(rng, 6, 100);
    const auto before = by_id(s);
    survival_phase(s, SurvivalTable::uniform(0.5), rng);
    for (const Agent& a : s.agents) {
        CHECK(before.at(a.id).age == a.age);
        CHECK(before.at(a.id).home_range == a.home_range);
    }
}

TEST_CASE("aging") {
    PopulationState s(3);
    const auto cub = s.add_agent(Sex::Female, 0, R(1)).id;
    s.add_agent(Sex::Male, 12, R(2));
    s.add_agent(Sex::Male, 4, R(2));
    CHECK(s.ranges[1].n_total == 0);
    const auto ev = aging_phase(s);
    CHECK(ev.eliminations_over_age == 1);
    REQUIRE(s.agents.size() == 2);
    CHECK(by_id(s).at(cub).age == 1);
    CHECK(by_id(s).at(cub).age_class() == AgeClass::Yearling);
    CHECK(s.ranges[1].n_female == 1);
    CHECK(s.ranges[2].n_male == 1);
    CHECK(counts_consistent(s));

    PopulationState empty(3);
    aging_phase(empty);
    CHECK(empty.agents.empty());
}

TEST_CASE("adult with a mate stays resident") {
    Rng rng(4);
    PopulationState s(5);
    const auto f = s.add_agent(Sex::Female, 4, R(0)).id;
    s.add_agent(Sex::Male, 4, R(0));
    const auto ev = dispersal_phase(s, rng);
    CHECK(ev.moves.empty());
    CHECK(by_id(s).at(f).resident);
    CHECK(by_id(s).at(f).home_range == R(0));
}

TEST_CASE("a lone pair in separate ranges meets in whichever range is visited second") {
    int male_first = 0, female_first = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        PopulationState s(6);
        const auto m = s.add_agent(Sex::Male, 5, R(0)).id;
        const auto f = s.add_agent(Sex::Female, 3, R(4)).id;
        // Every other range holds a resident pair, so the only mate-only
        // range for either floater is the other floater's range.
        for (std::uint32_t j : {1u, 2u, 3u, 5u}) {
            s.add_agent(Sex::Male, 6, R(j));
            s.add_agent(Sex::Female, 6, R(j));
        }
        const auto ev = dispersal_phase(s, rng);
        std::size_t pm = 0, pf = 0;
        for (std::size_t k = 0; k < ev.dispersal_log.size(); ++k) {
            if (ev.dispersal_log[k].agent == m) pm = k;
            if (ev.dispersal_log[k].agent == f) pf = k;
        }
        if (pm < pf) {
            ++male_first;
            CHECK(by_id(s).at(m).home_range == R(4));
            CHECK_FALSE(by_id(s).at(m).resident);
            CHECK(by_id(s).at(f).resident);
            CHECK(by_id(s).at(f).home_range == R(4));
        } else {
            ++female_first;
            CHECK(by_id(s).at(f).home_range == R(0));
            CHECK_FALSE(by_id(s).at(f).resident);
            CHECK(by_id(s).at(m).resident);
            CHECK(by_id(s).at(m).home_range == R(0));
        }
        CHECK(counts_consistent(s));
    }
    CHECK(male_first > 0);
    CHECK(female_first > 0);
}

TEST_CASE("with no mate-only range, a floater picks a least-occupied range uniformly") {
    // Ranges 1 and 2 hold one resident pair plus ... all ranges have a male;
    // ranges 3 and 4 are tied at the minimum occupancy.
    const int trials = 10000;
    int to3 = 0, to4 = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(77, 0, static_cast<std::uint64_t>(t)));
        PopulationState s(5);
        const auto m = s.add_agent(Sex::Male, 5, R(0)).id;
        for (std::uint32_t j = 1; j <= 4; ++j) {
            s.add_agent(Sex::Male, 5, R(j));
            s.add_agent(Sex::Female, 5, R(j));
        }
        s.add_agent(Sex::Male, 5, R(1));
        s.add_agent(Sex::Female, 5, R(1));
        s.add_agent(Sex::Male, 5, R(2));
        s.add_agent(Sex::Female, 5, R(2));
        dispersal_phase(s, rng);
        const auto dest = by_id(s).at(m).home_range;
        REQUIRE((dest == R(3) || dest == R(4)));
        (dest == R(3) ? to3 : to4)++;
    }
    const double sigma = std::sqrt(0.25 / trials);
    CHECK(std::abs(to3 / double(trials) - 0.5) < 3 * sigma);
    CHECK(to3 + to4 == trials);
}

TEST_CASE("yearlings always disperse") {
    Rng rng(12);
    for (Sex sex : kSexes) {
        PopulationState s(4);
        const auto y = s.add_agent(sex, 1, R(0)).id;
        s.add_agent(opposite(sex), 5, R(0));
        const auto ev = dispersal_phase(s, rng);
        CHECK_FALSE(by_id(s).at(y).resident);
        CHECK(by_id(s).at(y).home_range != R(0));
        CHECK(ev.moves.size() >= 1);
    }
}

TEST_CASE("dispersal invariants on random states") {
    Rng rng(2718);
    for (int trial = 0; trial < 300; ++trial) {
        PopulationState s = random_adult_state(rng, 2 + uniform_index(rng, 9), 1 + static_cast<int>(uniform_index(rng, 40)));
        const auto before = by_id(s);
        const auto ev = dispersal_phase(s, rng);
        REQUIRE(counts_consistent(s));
        REQUIRE(ev.dispersal_log.size() == s.agents.size());
        std::set<AgentId> moved;
        for (const Move& m : ev.moves) {
            REQUIRE(m.from != m.to);
            moved.insert(m.agent);
        }
        for (const Agent& a : s.agents) {
            REQUIRE(before.at(a.id).age == a.age);
            if (!a.resident) REQUIRE(moved.count(a.id) == 1);
            if (a.age == 1) REQUIRE_FALSE(a.resident);
        }
    }
}

TEST_CASE("single range: floaters stay put") {
    Rng rng(1);
    PopulationState s(1);
    s.add_agent(Sex::Male, 1, R(0));
    const auto ev = dispersal_phase(s, rng);
    CHECK(ev.moves.size() == 1);
    CHECK(ev.moves[0].to == R(0));
    CHECK(counts_consistent(s));
}

TEST_CASE("reproduction requires a male in the range") {
    Rng rng(6);
    PopulationState s(3);
    for (int i = 0; i < 20; ++i) s.add_agent(Sex::Female, 4, R(0));
    ReproParams p;
    p.p_repro_adult = 1.0;
    const auto ev = reproduction_phase(s, p, rng);
    CHECK(ev.litters.empty());
    CHECK(s.agents.size() == 20);
}

TEST_CASE("zero breeding probabilities give no litters") {
    Rng rng(6);
    PopulationState s = random_adult_state(rng, 5, 100);
    ReproParams p;
    p.p_repro_adult = 0.0;
    p.p_repro_yearling = 0.0;
    CHECK(reproduction_phase(s, p, rng).litters.empty());
}

TEST_CASE("newborns are cubs in the mother's range and are not counted") {
    Rng rng(10);
    PopulationState s = random_adult_state(rng, 4, 80);
    const auto ranges_before = s.ranges;
    const auto before = by_id(s);
    ReproParams p;
    p.p_repro_adult = 1.0;
    p.p_repro_yearling = 1.0;
    const auto ev = reproduction_phase(s, p, rng);
    CHECK(s.ranges == ranges_before);
    CHECK(counts_consistent(s));
    std::size_t born = 0;
    for (const Litter& l : ev.litters) {
        const Agent& mother = before.at(l.mother);
        CHECK(mother.sex == Sex::Female);
        CHECK(mother.age >= 1);
        CHECK(l.range == mother.home_range);
        born += static_cast<std::size_t>(l.size);
    }
    CHECK(born == ev.births);
    CHECK(s.agents.size() == before.size() + born);
    for (const Agent& a : s.agents) {
        if (before.count(a.id)) {
            CHECK(before.at(a.id).age == a.age);
            continue;
        }
        CHECK(a.age == 0);
        CHECK_FALSE(a.resident);
    }
    // every newborn sits in some litter's range
    std::multiset<std::uint32_t> expected, got;
    for (const Litter& l : ev.litters)
        for (int c = 0; c < l.size; ++c) expected.insert(l.range.value);
    for (const Agent& a : s.agents)
        if (!before.count(a.id)) got.insert(a.home_range.value);
    CHECK(expected == got);
}

TEST_CASE("litter size distribution") {
    // Oracle: P(max(0, round(X)) = k) from the normal CDF.
    const double mean = 4.0, sd = 1.0;
    double clamp_shift = 0.0;
    for (int k = -20; k <= -1; ++k) clamp_shift += -k * p_rounded(k, mean, sd);
    CHECK(clamp_shift < 0.001);

    Rng rng(31337);
    const ReproParams p;
    const int n = 100000;
    double sum = 0;
    int in_range = 0;
    for (int i = 0; i < n; ++i) {
        const int k = draw_litter_size(p, rng);
        REQUIRE(k >= 0);
        sum += k;
        in_range += (k <= 8);
    }
    CHECK(std::abs(sum / n - 4.0) <= 0.02);
    CHECK(in_range >= 0.999 * n);
}

TEST_CASE("litter size is clamped at zero") {
    ReproParams p;
    p.litter_mean = -3.0;
    p.litter_sd = 0.5;
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) CHECK(draw_litter_size(p, rng) == 0);
}

TEST_CASE("phases replay identically from the same stream state") {
    Rng seed_rng(55);
    const PopulationState start = random_adult_state(seed_rng, 8, 120);
    auto run = [&] {
        PopulationState s = start;
        Rng rng(1234);
        PhaseEvents ev = survival_phase(s, SurvivalTable::uniform(0.8), rng);
        ev.append(aging_phase(s));
        ev.append(dispersal_phase(s, rng));
        ev.append(reproduction_phase(s, ReproParams{}, rng));
        return std::pair{ev, s.agents.size()};
    };
    CHECK(run() == run());
}

TEST_CASE("ReproParams validation") {
    ReproParams p;
    CHECK_NOTHROW(p.validate());
    p.p_repro_adult = 1.5;
    CHECK_THROWS_AS(p.validate(), ContractError);
    p = {};
    p.litter_sd = -1;
    CHECK_THROWS_AS(p.validate(), ContractError);
}

}
