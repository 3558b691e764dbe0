#include "foxpop/survival.hpp"

#include "foxpop/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace foxpop {

namespace {

std::string cell_label(Cell c) {
    return "(" + std::string(to_string(c.age_class)) + ", " + std::string(to_string(c.sex)) + ")";
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::string cell_key(Cell c) {
    return std::string(to_string(c.age_class)) + "_" + std::string(to_string(c.sex));
}

SurvivalTable::SurvivalTable(const std::array<double, kNumCells>& p) : p_(p) {
    for (std::size_t i = 0; i < kNumCells; ++i)
        if (!std::isfinite(p[i]) || p[i] < 0.0 || p[i] > 1.0)
            throw ContractError("survival probability for " + cell_key(cell_at(i)) +
                                " outside [0, 1]");
}

SurvivalTable SurvivalTable::by_age_class(double cub, double yearling, double adult) {
    return SurvivalTable({cub, cub, yearling, yearling, adult, adult});
}

BayesEstimate estimate_bayes(const CohortCounts& cohort) {
    std::array<std::uint64_t, 3> n_age{}, s_age{};
    std::array<std::uint64_t, 2> n_sex{}, s_sex{};
    std::uint64_t n = 0, s = 0;
    for (std::size_t i = 0; i < kNumCells; ++i) {
        const Cell c = cell_at(i);
        const CellCounts& k = cohort.cells[i];
        const auto a = static_cast<std::size_t>(c.age_class);
        const auto x = static_cast<std::size_t>(c.sex);
        n_age[a] += k.total();
        s_age[a] += k.survived;
        n_sex[x] += k.total();
        s_sex[x] += k.survived;
        n += k.total();
        s += k.survived;
    }
    if (n == 0) throw EstimationError("cohort has no observations");
    for (AgeClass a : kAgeClasses)
        if (n_age[static_cast<std::size_t>(a)] == 0)
            throw EstimationError("no observations for age class " +
                                  std::string(to_string(a)) + " (marginal p(A) is zero)");
    for (Sex x : kSexes)
        if (n_sex[static_cast<std::size_t>(x)] == 0)
            throw EstimationError("no observations for sex " + std::string(to_string(x)) +
                                  " (marginal p(s) is zero)");

    BayesEstimate out;
    if (s == 0) return out;

    const double N = static_cast<double>(n);
    const double S = static_cast<double>(s);
    const double p_survive = S / N;
    for (std::size_t i = 0; i < kNumCells; ++i) {
        const Cell c = cell_at(i);
        const auto a = static_cast<std::size_t>(c.age_class);
        const auto x = static_cast<std::size_t>(c.sex);
        const double p_age_given_survived = static_cast<double>(s_age[a]) / S;
        const double p_sex_given_survived = static_cast<double>(s_sex[x]) / S;
        const double p_age = static_cast<double>(n_age[a]) / N;
        const double p_sex = static_cast<double>(n_sex[x]) / N;
        const double raw =
            p_age_given_survived * p_sex_given_survived * p_survive / (p_age * p_sex);
        out.diagnostics.raw_values[i] = raw;
        if (raw < 0.0 || raw > 1.0) out.diagnostics.clamped_cells.push_back(c);
    }
    std::array<double, kNumCells> clamped{};
    std::ranges::transform(out.diagnostics.raw_values, clamped.begin(), clamp01);
    out.table = SurvivalTable(clamped);
    return out;
}

SurvivalTable direct_estimate(const CohortCounts& cohort) {
    std::array<double, kNumCells> p{};
    for (std::size_t i = 0; i < kNumCells; ++i) {
        const CellCounts& k = cohort.cells[i];
        if (k.total() == 0)
            throw EstimationError("no observations for cell " + cell_label(cell_at(i)));
        p[i] = static_cast<double>(k.survived) / static_cast<double>(k.total());
    }
    return SurvivalTable(p);
}

SurvivalTable shift_table(const SurvivalTable& table, AgeClass age_class, double delta) {
    auto p = table.values();
    for (Sex s : kSexes) {
        double& v = p[cell_index(age_class, s)];
        v = clamp01(v + delta);
    }
    return SurvivalTable(p);
}

CohortCounts read_cohort_csv(std::istream& in) {
    const auto rows = read_csv(in);
    if (rows.empty()) throw EstimationError("cohort file is empty");
    const std::vector<std::string> header{"age_class", "sex", "survived", "died"};
    if (rows.front() != header)
        throw EstimationError("cohort header must be `age_class,sex,survived,died`");

    CohortCounts cohort;
    std::array<bool, kNumCells> seen{};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = "cohort line " + std::to_string(r + 1);
        if (row.size() != 4) throw EstimationError(where + ": expected 4 fields");

        AgeClass a{};
        if (row[0] == "cub")
            a = AgeClass::Cub;
        else if (row[0] == "yearling")
            a = AgeClass::Yearling;
        else if (row[0] == "adult")
            a = AgeClass::Adult;
        else
            throw EstimationError(where + ": unknown age_class '" + row[0] + "'");

        Sex x{};
        if (row[1] == "f")
            x = Sex::Female;
        else if (row[1] == "m")
            x = Sex::Male;
        else
            throw EstimationError(where + ": unknown sex '" + row[1] + "'");

        auto parse_count = [&](const std::string& field, const char* name) {
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || ptr != field.data() + field.size())
                throw EstimationError(where + ": " + name + " is not a non-negative integer");
            return v;
        };
        const Cell c{a, x};
        const auto idx = cell_index(a, x);
        if (seen[idx]) throw EstimationError(where + ": duplicate cell " + cell_label(c));
        seen[idx] = true;
        cohort[c] = CellCounts{parse_count(row[2], "survived"), parse_count(row[3], "died")};
    }
    return cohort;
}

CohortCounts read_cohort_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read cohort file " + path.string());
    return read_cohort_csv(in);
}

}  // namespace foxpop
