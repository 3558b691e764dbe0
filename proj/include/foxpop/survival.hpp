/*! @file survival.hpp
    @brief Age- and sex-conditional survival probabilities and their
           estimation from tagged-cohort counts.
*/
#pragma once

#include "foxpop/core.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace foxpop {

//! One (age class, sex) combination.
struct Cell {
    AgeClass age_class{};
    Sex sex{};
    friend constexpr bool operator==(Cell, Cell) = default;
};

inline constexpr std::size_t kNumCells = 6;

constexpr std::size_t cell_index(AgeClass a, Sex s) noexcept {
    return static_cast<std::size_t>(a) * 2 + static_cast<std::size_t>(s);
}
constexpr Cell cell_at(std::size_t index) noexcept {
    return Cell{static_cast<AgeClass>(index / 2), static_cast<Sex>(index % 2)};
}
//! "adult_f", "cub_m", ...; also the config keys of a survival table.
std::string cell_key(Cell c);

//! Estimation input is inconsistent or lacks data for a cell.
class EstimationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CellCounts {
    std::uint64_t survived{};
    std::uint64_t died{};
    std::uint64_t total() const noexcept { return survived + died; }
};

//! Survival trials of a tagged cohort. Each (animal, year) transition is one trial.
struct CohortCounts {
    std::array<CellCounts, kNumCells> cells{};

    CellCounts& operator[](Cell c) noexcept { return cells[cell_index(c.age_class, c.sex)]; }
    const CellCounts& operator[](Cell c) const noexcept {
        return cells[cell_index(c.age_class, c.sex)];
    }
};

//! p(survive | age class, sex); every entry in [0, 1].
class SurvivalTable {
  public:
    SurvivalTable() = default;
    //! Throws ContractError if any value is outside [0, 1] or not finite.
    explicit SurvivalTable(const std::array<double, kNumCells>& p);
    //! Same probability for both sexes of each age class.
    static SurvivalTable by_age_class(double cub, double yearling, double adult);
    static SurvivalTable uniform(double p) { return by_age_class(p, p, p); }

    double operator()(AgeClass a, Sex s) const noexcept { return p_[cell_index(a, s)]; }
    double operator[](Cell c) const noexcept { return p_[cell_index(c.age_class, c.sex)]; }
    const std::array<double, kNumCells>& values() const noexcept { return p_; }

    friend bool operator==(const SurvivalTable&, const SurvivalTable&) = default;

  private:
    std::array<double, kNumCells> p_{};
};

struct SurvivalDiagnostics {
    //! Value of the estimator before clamping to [0, 1].
    std::array<double, kNumCells> raw_values{};
    std::vector<Cell> clamped_cells;
};

struct BayesEstimate {
    SurvivalTable table;
    SurvivalDiagnostics diagnostics;
};

/*! Estimate survival through Bayes' rule with age class and sex taken as
    independent:

        p(phi=1 | A, s) = p(A | phi=1) p(s | phi=1) p(phi=1) / (p(A) p(s))

    All probabilities are empirical frequencies pooled over the cohort.
    Raw values outside [0, 1] are clamped and listed in the diagnostics.
    An all-dead cohort yields an all-zero table. Throws EstimationError for an
    empty cohort or when an age class or sex has no trials.
*/
BayesEstimate estimate_bayes(const CohortCounts& cohort);

//! survived / (survived + died) per cell. Throws EstimationError naming the
//! first cell with no trials.
SurvivalTable direct_estimate(const CohortCounts& cohort);

//! Adds @p delta to both sexes of @p age_class, clamping to [0, 1].
SurvivalTable shift_table(const SurvivalTable& table, AgeClass age_class, double delta);

//! Reads `age_class,sex,survived,died` rows. Cells absent from the file keep
//! zero counts. Throws EstimationError on malformed input or a duplicated cell.
CohortCounts read_cohort_csv(std::istream& in);
CohortCounts read_cohort_csv(const std::filesystem::path& path);

}  // namespace foxpop
