#include "foxpop/core.hpp"
#include "foxpop/rng.hpp"

#include <doctest.h>

using namespace foxpop;

namespace {

// Counts by scanning the roster, independent of HomeRange bookkeeping.
struct ScanCounts {
    std::uint32_t male{}, female{};
};

std::vector<ScanCounts> scan(const PopulationState& s) {
    std::vector<ScanCounts> out(s.ranges.size());
    for (const Agent& a : s.agents) {
        if (a.age == 0) continue;
        if (a.sex == Sex::Male)
            ++out[a.home_range.value].male;
        else
            ++out[a.home_range.value].female;
    }
    return out;
}

PopulationState random_state(Rng& rng) {
    PopulationState s(1 + uniform_index(rng, 8));
    const auto n = uniform_index(rng, 25);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Sex sex = bernoulli(rng, 0.5) ? Sex::Female : Sex::Male;
        const int age = static_cast<int>(uniform_int(rng, 0, kMaxAge));
        s.add_agent(sex, age, RangeId{static_cast<std::uint32_t>(uniform_index(rng, s.ranges.size()))});
    }
    return s;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("classify_age partitions [0, 12]") {
    CHECK(classify_age(0) == AgeClass::Cub);
    CHECK(classify_age(1) == AgeClass::Yearling);
    for (int a = 2; a <= 12; ++a) CHECK(classify_age(a) == AgeClass::Adult);
    CHECK_THROWS_AS(classify_age(13), ContractError);
    CHECK_THROWS_AS(classify_age(-1), ContractError);
}

TEST_CASE("rebuild_counts on an empty roster") {
    PopulationState s(5);
    rebuild_counts(s);
    for (const auto& r : s.ranges) {
        CHECK(r.n_total == 0);
        CHECK(r.n_male == 0);
        CHECK(r.n_female == 0);
    }
    CHECK(count_non_cubs(s) == 0);
}

TEST_CASE("cubs are not counted") {
    PopulationState s(5);
    s.add_agent(Sex::Male, 4, RangeId{3});
    s.add_agent(Sex::Female, 0, RangeId{3});
    rebuild_counts(s);
    CHECK(s.ranges[3].n_male == 1);
    CHECK(s.ranges[3].n_female == 0);
    CHECK(s.ranges[3].n_total == 1);
}

TEST_CASE("n_total is the sum of the sexes") {
    PopulationState s(2);
    for (int i = 0; i < 2; ++i) {
        s.add_agent(Sex::Male, 3, RangeId{1});
        s.add_agent(Sex::Female, 5, RangeId{1});
    }
    rebuild_counts(s);
    CHECK(s.ranges[1].n_total == 4);
    CHECK(s.ranges[1].n_male == 2);
    CHECK(s.ranges[1].n_female == 2);
}

TEST_CASE("count_non_cubs") {
    PopulationState s(3);
    for (int i = 0; i < 10; ++i) s.add_agent(Sex::Female, 0, RangeId{0});
    CHECK(count_non_cubs(s) == 0);
    for (int i = 0; i < 5; ++i) s.add_agent(Sex::Male, 1, RangeId{1});
    for (int i = 0; i < 7; ++i) s.add_agent(Sex::Female, 6, RangeId{2});
    CHECK(count_non_cubs(s) == 12);
    CHECK(cached_total(rebuilt(s)) == count_non_cubs(s));
}

TEST_CASE("ids are monotone and never reused") {
    PopulationState s(2);
    const auto a = s.add_agent(Sex::Male, 2, RangeId{0}).id;
    const auto b = s.add_agent(Sex::Male, 2, RangeId{0}).id;
    s.agents.pop_back();
    const auto c = s.add_agent(Sex::Female, 2, RangeId{1}).id;
    CHECK(a < b);
    CHECK(b < c);
}

TEST_CASE("add_agent rejects a missing range") {
    PopulationState s(2);
    CHECK_THROWS_AS(s.add_agent(Sex::Male, 2, RangeId{2}), ContractError);
}

TEST_CASE("incremental counts match a roster scan on random states") {
    Rng rng(123);
    for (int trial = 0; trial < 500; ++trial) {
        const PopulationState s = random_state(rng);
        const auto expected = scan(s);
        std::size_t total = 0;
        for (std::size_t j = 0; j < s.ranges.size(); ++j) {
            REQUIRE(s.ranges[j].n_male == expected[j].male);
            REQUIRE(s.ranges[j].n_female == expected[j].female);
            REQUIRE(s.ranges[j].n_total == s.ranges[j].n_male + s.ranges[j].n_female);
            total += s.ranges[j].n_total;
        }
        REQUIRE(total == count_non_cubs(s));
        REQUIRE(counts_consistent(s));
    }
}

}
