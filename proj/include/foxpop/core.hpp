/*! @file core.hpp
    @brief Domain types shared by every phase: agents, home ranges and the
           population state with its cached occupancy counts.
*/
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foxpop {

//! Precondition violated by a caller.
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

enum class Sex : std::uint8_t { Female, Male };
enum class AgeClass : std::uint8_t { Cub, Yearling, Adult };

inline constexpr std::array<Sex, 2> kSexes{Sex::Female, Sex::Male};
inline constexpr std::array<AgeClass, 3> kAgeClasses{AgeClass::Cub, AgeClass::Yearling,
                                                     AgeClass::Adult};

//! Oldest age an agent may reach; older agents are eliminated.
inline constexpr int kMaxAge = 12;

constexpr Sex opposite(Sex s) noexcept { return s == Sex::Female ? Sex::Male : Sex::Female; }

std::string_view to_string(Sex s) noexcept;        // "f" / "m"
std::string_view to_string(AgeClass a) noexcept;   // "cub" / "yearling" / "adult"

//! 0 -> Cub, 1 -> Yearling, 2..12 -> Adult. Throws ContractError otherwise.
AgeClass classify_age(int age);

//! Index of a home range, stable for the lifetime of a run.
struct RangeId {
    std::uint32_t value{};
    friend constexpr auto operator<=>(RangeId, RangeId) = default;
};

using AgentId = std::uint64_t;

struct Agent {
    AgentId id{};
    Sex sex{Sex::Female};
    int age{};
    //! true = resident, false = floater. Cubs are always floaters.
    bool resident{false};
    RangeId home_range{};

    AgeClass age_class() const { return classify_age(age); }
    bool is_cub() const noexcept { return age == 0; }
};

//! Occupancy of one territory. Cubs are never counted.
struct HomeRange {
    RangeId id{};
    std::uint32_t n_total{};
    std::uint32_t n_male{};
    std::uint32_t n_female{};

    std::uint32_t count(Sex s) const noexcept { return s == Sex::Male ? n_male : n_female; }
    void add(Sex s) noexcept;
    //! Precondition: the count for @p s is positive.
    void remove(Sex s) noexcept;

    friend bool operator==(const HomeRange&, const HomeRange&) = default;
};

struct PopulationState {
    int year{0};
    std::vector<Agent> agents;
    std::vector<HomeRange> ranges;
    //! Next id to hand out; ids are never reused within a run.
    AgentId next_id{0};

    PopulationState() = default;
    //! Empty population over @p num_ranges territories.
    explicit PopulationState(std::size_t num_ranges);

    HomeRange& range(RangeId id) { return ranges.at(id.value); }
    const HomeRange& range(RangeId id) const { return ranges.at(id.value); }

    //! Appends an agent with a fresh id and updates the counts of its range.
    Agent& add_agent(Sex sex, int age, RangeId home_range);
};

//! Recomputes every range's counts from the roster.
void rebuild_counts(PopulationState& state);

//! Returns a copy of @p state with counts recomputed; the reference oracle.
PopulationState rebuilt(PopulationState state);

//! Number of agents aged 1 or more (n^t).
std::size_t count_non_cubs(const PopulationState& state) noexcept;

//! Sum of cached n_total over all ranges.
std::size_t cached_total(const PopulationState& state) noexcept;

//! True if every cached count equals a fresh roster scan.
bool counts_consistent(const PopulationState& state);

}  // namespace foxpop
