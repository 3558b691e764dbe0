#include "foxpop/experiments.hpp"

#include "foxpop/csv_io.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

namespace foxpop {

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
    case SweepAxis::InitialN: return "initial-n";
    case SweepAxis::CubSurvival: return "cub-survival";
    case SweepAxis::YearlingSurvival: return "yearling-survival";
    case SweepAxis::AdultSurvival: return "adult-survival";
    }
    return "?";
}

std::optional<SweepAxis> parse_axis(std::string_view name) noexcept {
    for (SweepAxis a : {SweepAxis::InitialN, SweepAxis::CubSurvival, SweepAxis::YearlingSurvival,
                        SweepAxis::AdultSurvival})
        if (name == to_string(a)) return a;
    return std::nullopt;
}

AgeClass axis_age_class(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::CubSurvival: return AgeClass::Cub;
    case SweepAxis::YearlingSurvival: return AgeClass::Yearling;
    case SweepAxis::AdultSurvival: return AgeClass::Adult;
    case SweepAxis::InitialN: break;
    }
    throw ContractError("initial-n is not a survival axis");
}

std::vector<double> default_axis_values(SweepAxis axis) {
    std::vector<double> v;
    if (axis == SweepAxis::InitialN) {
        for (int n = 20; n <= 470; n += 50) v.push_back(n);
    } else {
        // k / 20 is the double nearest each multiple of 0.05
        for (int k = -4; k <= 4; ++k) v.push_back(k / 20.0);
    }
    return v;
}

void SweepSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep.values", "must not be empty");
    if (runs_per_scenario < 1) throw ConfigError("sweep.runs_per_scenario", "must be >= 1");
    if (axis == SweepAxis::InitialN)
        for (double v : values)
            if (!(v >= 0.0) || v != std::floor(v) || v > 1e9)
                throw ConfigError("sweep.values", "initial-n values must be non-negative integers");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("sweep.values", "values must be finite");
}

std::string scenario_label(SweepAxis axis, double value) {
    return std::string(to_string(axis)) + ":" + format_real(value);
}

void apply_scenario(SweepAxis axis, double value, ModelParams& params, InitParams& init) {
    if (axis == SweepAxis::InitialN)
        init.n0 = static_cast<int>(value);
    else
        params.survival = shift_table(params.survival, axis_age_class(axis), value);
}

ScenarioStats aggregate(std::span<const RunRecord> runs) {
    if (runs.empty()) throw ContractError("aggregate: no runs");
    ScenarioStats s;
    s.scenario = runs.front().scenario;
    s.axis_value = runs.front().axis_value;
    s.n_runs = runs.size();
    std::size_t extinct = 0, max_limit = 0;
    std::vector<double> lambdas;
    for (const RunRecord& r : runs) {
        if (r.outcome == Outcome::Extinct) ++extinct;
        if (r.outcome == Outcome::MaxLimit) ++max_limit;
        if (r.lambda) lambdas.push_back(*r.lambda);
    }
    const auto n = static_cast<double>(runs.size());
    s.pct_extinct = static_cast<double>(extinct) / n;
    s.pct_max_limit = static_cast<double>(max_limit) / n;
    if (!lambdas.empty()) {
        const auto m = static_cast<double>(lambdas.size());
        const double mean = std::accumulate(lambdas.begin(), lambdas.end(), 0.0) / m;
        double ss = 0.0;
        for (double x : lambdas) ss += (x - mean) * (x - mean);
        std::ranges::sort(lambdas);
        const std::size_t h = lambdas.size() / 2;
        s.lambda_mean = mean;
        s.lambda_median = lambdas.size() % 2 ? lambdas[h] : 0.5 * (lambdas[h - 1] + lambdas[h]);
        s.lambda_std = lambdas.size() > 1 ? std::sqrt(ss / (m - 1.0)) : 0.0;
    }
    return s;
}

std::vector<ScenarioStats> aggregate_by_scenario(std::span<const RunRecord> runs) {
    std::vector<ScenarioStats> out;
    std::size_t begin = 0;
    while (begin < runs.size()) {
        std::size_t end = begin + 1;
        while (end < runs.size() && runs[end].scenario == runs[begin].scenario) ++end;
        out.push_back(aggregate(runs.subspan(begin, end - begin)));
        begin = end;
    }
    return out;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

SweepResult run_sweep(const SweepSpec& spec, const ModelParams& base_params,
                      const InitParams& init, unsigned workers, bool keep_trajectories) {
    spec.validate();
    base_params.validate();
    init.validate();

    struct Scenario {
        ModelParams params;
        InitParams init;
        std::string label;
    };
    std::vector<Scenario> scenarios;
    for (double v : spec.values) {
        Scenario s{base_params, init, scenario_label(spec.axis, v)};
        apply_scenario(spec.axis, v, s.params, s.init);
        scenarios.push_back(std::move(s));
    }

    const auto runs_per = static_cast<std::size_t>(spec.runs_per_scenario);
    const std::size_t total = scenarios.size() * runs_per;
    SweepResult out;
    out.runs.resize(total);
    if (keep_trajectories) out.trajectories.resize(total);

    parallel_for(total, workers, [&](std::size_t k) {
        const std::size_t i = k / runs_per;
        const std::size_t j = k % runs_per;
        const std::uint64_t seed = derive_seed(spec.base_seed, i, j);
        RunResult r = run_simulation(scenarios[i].params, scenarios[i].init, seed);
        out.runs[k] = RunRecord{scenarios[i].label, spec.values[i], static_cast<int>(j), seed,
                                r.outcome, r.years(), r.lambda, r.final_n()};
        if (keep_trajectories)
            out.trajectories[k] =
                TrajectoryEntry{scenarios[i].label, static_cast<int>(j), std::move(r.trajectory)};
    });
    out.stats = aggregate_by_scenario(out.runs);
    return out;
}

std::string runs_csv(std::span<const RunRecord> runs) {
    std::string out = "scenario,axis_value,run_index,seed,outcome,years,lambda,final_n\n";
    for (const RunRecord& r : runs) {
        out += join_csv({r.scenario, format_real(r.axis_value), std::to_string(r.run_index),
                         std::to_string(r.seed), std::string(to_string(r.outcome)),
                         std::to_string(r.years), format_real(r.lambda),
                         std::to_string(r.final_n)});
        out += '\n';
    }
    return out;
}

std::string scenarios_csv(std::span<const ScenarioStats> stats) {
    std::string out =
        "scenario,axis_value,n_runs,pct_extinct,pct_max_limit,lambda_mean,lambda_median,"
        "lambda_std\n";
    for (const ScenarioStats& s : stats) {
        out += join_csv({s.scenario, format_real(s.axis_value), std::to_string(s.n_runs),
                         format_real(s.pct_extinct), format_real(s.pct_max_limit),
                         format_real(s.lambda_mean), format_real(s.lambda_median),
                         format_real(s.lambda_std)});
        out += '\n';
    }
    return out;
}

std::string trajectories_csv(std::span<const TrajectoryEntry> trajectories) {
    std::string out = "scenario,run_index,year,n,n_cubs,n_yearlings,n_adults\n";
    for (const TrajectoryEntry& t : trajectories)
        for (const YearRecord& y : t.trajectory) {
            out += join_csv({t.scenario, std::to_string(t.run_index), std::to_string(y.year),
                             std::to_string(y.n_non_cub), std::to_string(y.n_cubs),
                             std::to_string(y.n_yearlings), std::to_string(y.n_adults)});
            out += '\n';
        }
    return out;
}

namespace {

template <class Int>
Int parse_int(const std::string& field) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument("not an integer: '" + field + "'");
    return v;
}

}  // namespace

std::vector<RunRecord> parse_runs_csv(std::istream& in) {
    const auto rows = read_csv(in);
    const std::vector<std::string> header{"scenario", "axis_value", "run_index", "seed",
                                          "outcome",  "years",      "lambda",    "final_n"};
    if (rows.empty() || rows.front() != header)
        throw std::invalid_argument("per-run CSV header mismatch");
    std::vector<RunRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != header.size())
            throw std::invalid_argument("per-run CSV line " + std::to_string(i + 1) +
                                        ": wrong field count");
        const auto outcome = parse_outcome(f[4]);
        if (!outcome) throw std::invalid_argument("unknown outcome '" + f[4] + "'");
        out.push_back(RunRecord{f[0], parse_real(f[1]), parse_int<int>(f[2]),
                                parse_int<std::uint64_t>(f[3]), *outcome, parse_int<int>(f[5]),
                                parse_optional_real(f[6]), parse_int<std::size_t>(f[7])});
    }
    return out;
}

// ---------------------------------------------------------------------------

CalibrationTarget reported_cub_targets() {
    CalibrationTarget t;
    t.rows = {
        {SweepAxis::CubSurvival, 0.0, 0.99, 0.0},
        {SweepAxis::CubSurvival, 0.05, 0.55, 0.0},
        {SweepAxis::CubSurvival, 0.10, 0.01, 0.95},
        {SweepAxis::CubSurvival, 0.15, 0.0, 1.0},
        {SweepAxis::CubSurvival, 0.20, 0.0, 1.0},
    };
    return t;
}

CalibrationTarget read_targets_csv(std::istream& in) {
    const auto rows = read_csv(in);
    const std::vector<std::string> header{"axis", "delta", "pct_extinct", "pct_max_limit"};
    if (rows.empty() || rows.front() != header)
        throw ConfigError("targets", "header must be `axis,delta,pct_extinct,pct_max_limit`");
    CalibrationTarget t;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string where = "targets line " + std::to_string(i + 1);
        const auto& f = rows[i];
        if (f.size() != 4) throw ConfigError(where, "expected 4 fields");
        const auto axis = parse_axis(f[0]);
        if (!axis || *axis == SweepAxis::InitialN)
            throw ConfigError(where, "axis must be a survival axis, got '" + f[0] + "'");
        CalibrationRow row{*axis, 0, 0, 0};
        try {
            row.delta = parse_real(f[1]);
            row.pct_extinct = parse_real(f[2]);
            row.pct_max_limit = parse_real(f[3]);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where, e.what());
        }
        for (double p : {row.pct_extinct, row.pct_max_limit})
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(where, "fractions must lie in [0, 1]");
        if (row.pct_extinct + row.pct_max_limit > 1.0 + 1e-12)
            throw ConfigError(where, "pct_extinct + pct_max_limit exceeds 1");
        t.rows.push_back(row);
    }
    if (t.rows.empty()) throw ConfigError("targets", "no target rows");
    return t;
}

void SearchSpace::validate() const {
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0))
        throw ConfigError("search.range", "need 0 <= lo <= hi <= 1");
    if (!(coarse_step > 0.0)) throw ConfigError("search.coarse_step", "must be positive");
    if (coarse_runs < 1 || refine_runs < 1) throw ConfigError("search.runs", "must be >= 1");
    if (cub_refine_levels < 0) throw ConfigError("search.cub_refine_levels", "must be >= 0");
    if (refine_levels < 0) throw ConfigError("search.refine_levels", "must be >= 0");
    if (keep < 1) throw ConfigError("search.keep", "must be >= 1");
}

namespace {

double snap(double x) { return std::round(x * 1e6) / 1e6; }

// Scores many candidates at once so every (candidate, row, run) triple is
// one unit of parallel work.
std::vector<CandidateScore> score_all(const std::vector<SurvivalTable>& tables,
                                      const CalibrationTarget& target,
                                      const ModelParams& base_params, const InitParams& init,
                                      int runs, std::uint64_t base_seed, unsigned workers,
                                      double tolerance) {
    const std::size_t n_rows = target.rows.size();
    const auto n_runs = static_cast<std::size_t>(runs);
    std::vector<ModelParams> params;
    params.reserve(tables.size() * n_rows);
    for (const SurvivalTable& table : tables)
        for (const CalibrationRow& row : target.rows) {
            ModelParams p = base_params;
            p.survival = shift_table(table, axis_age_class(row.axis), row.delta);
            params.push_back(std::move(p));
        }
    std::vector<Outcome> outcomes(params.size() * n_runs);
    parallel_for(outcomes.size(), workers, [&](std::size_t k) {
        const std::size_t cell = k / n_runs;
        const std::size_t run = k % n_runs;
        const std::size_t row = cell % n_rows;
        outcomes[k] = run_simulation(params[cell], init, derive_seed(base_seed, row, run)).outcome;
    });

    std::vector<CandidateScore> scores;
    scores.reserve(tables.size());
    const double tol = tolerance / 100.0 + 1e-12;
    for (std::size_t c = 0; c < tables.size(); ++c) {
        CandidateScore s{tables[c], 0.0, runs, {}};
        for (std::size_t r = 0; r < n_rows; ++r) {
            const std::size_t base = (c * n_rows + r) * n_runs;
            std::size_t ext = 0, max = 0;
            for (std::size_t j = 0; j < n_runs; ++j) {
                ext += outcomes[base + j] == Outcome::Extinct;
                max += outcomes[base + j] == Outcome::MaxLimit;
            }
            RowFit fit{target.rows[r], static_cast<double>(ext) / static_cast<double>(n_runs),
                       static_cast<double>(max) / static_cast<double>(n_runs), false};
            const double de = fit.achieved_extinct - fit.target.pct_extinct;
            const double dm = fit.achieved_max_limit - fit.target.pct_max_limit;
            fit.within_tolerance = std::abs(de) <= tol && std::abs(dm) <= tol;
            s.sse += de * de + dm * dm;
            s.fits.push_back(fit);
        }
        scores.push_back(std::move(s));
    }
    return scores;
}

std::vector<CandidateScore> best_unique(std::vector<CandidateScore> scores, std::size_t keep) {
    // Ties go to the smaller (cub, yearling, adult) triple so the choice is
    // independent of evaluation order.
    std::ranges::sort(scores, [](const CandidateScore& a, const CandidateScore& b) {
        if (a.sse != b.sse) return a.sse < b.sse;
        return a.table.values() < b.table.values();
    });
    if (scores.size() > keep) scores.resize(keep);
    return scores;
}

}  // namespace

CandidateScore score_candidate(const SurvivalTable& table, const CalibrationTarget& target,
                               const ModelParams& base_params, const InitParams& init, int runs,
                               std::uint64_t base_seed, unsigned workers) {
    return score_all({table}, target, base_params, init, runs, base_seed, workers,
                     target.tolerance_points)
        .front();
}

CalibrationResult calibrate_defaults(const CalibrationTarget& target, const SearchSpace& space,
                                     const ModelParams& base_params, const InitParams& init) {
    space.validate();
    if (target.rows.empty()) throw ConfigError("targets", "no target rows");

    std::vector<double> axis;
    for (int k = 0;; ++k) {
        const double v = snap(space.lo + k * space.coarse_step);
        if (v > space.hi + 1e-9) break;
        axis.push_back(v);
    }
    std::vector<SurvivalTable> grid;
    for (double c : axis)
        for (double y : axis)
            for (double a : axis) grid.push_back(SurvivalTable::by_age_class(c, y, a));

    CalibrationResult result;
    result.candidates_evaluated = grid.size();
    auto scored = score_all(grid, target, base_params, init, space.coarse_runs, space.base_seed,
                            space.workers, target.tolerance_points);

    // Best cub value per (yearling, adult) pair, then bisect along cub.
    auto key = [](const SurvivalTable& t) {
        return std::pair{t(AgeClass::Yearling, Sex::Female), t(AgeClass::Adult, Sex::Female)};
    };
    auto best_per_pair = [&](std::vector<CandidateScore> all) {
        std::map<std::pair<double, double>, CandidateScore> best;
        for (CandidateScore& s : all) {
            auto [it, fresh] = best.try_emplace(key(s.table), s);
            if (!fresh && (s.sse < it->second.sse ||
                           (s.sse == it->second.sse && s.table.values() < it->second.table.values())))
                it->second = std::move(s);
        }
        std::vector<CandidateScore> out;
        for (auto& [k, s] : best) out.push_back(std::move(s));
        return out;
    };
    auto ridge = best_per_pair(std::move(scored));
    double cub_step = space.coarse_step;
    for (int level = 0; level < space.cub_refine_levels; ++level) {
        cub_step /= 2.0;
        std::vector<SurvivalTable> batch;
        for (const CandidateScore& r : ridge) {
            const double c0 = r.table(AgeClass::Cub, Sex::Female);
            const auto [y0, a0] = key(r.table);
            for (int d : {-1, 1}) {
                const double c = snap(c0 + d * cub_step);
                if (c >= space.lo - 1e-9 && c <= space.hi + 1e-9)
                    batch.push_back(SurvivalTable::by_age_class(c, y0, a0));
            }
        }
        result.candidates_evaluated += batch.size();
        auto fresh = score_all(batch, target, base_params, init, space.coarse_runs, space.base_seed,
                               space.workers, target.tolerance_points);
        fresh.insert(fresh.end(), std::make_move_iterator(ridge.begin()),
                     std::make_move_iterator(ridge.end()));
        ridge = best_per_pair(std::move(fresh));
    }
    auto kept = best_unique(std::move(ridge), space.keep);

    double step = space.coarse_step;
    for (int level = 0; level < space.refine_levels; ++level) {
        step /= 2.0;
        const double cstep = cub_step / double(1 << (level + 1));
        std::set<std::array<double, 3>> seen;
        std::vector<SurvivalTable> batch;
        for (const CandidateScore& k : kept) {
            const double c0 = k.table(AgeClass::Cub, Sex::Female);
            const double y0 = k.table(AgeClass::Yearling, Sex::Female);
            const double a0 = k.table(AgeClass::Adult, Sex::Female);
            for (int dc = -1; dc <= 1; ++dc)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int da = -1; da <= 1; ++da) {
                        auto at = [&](double v0, int d) {
                            return snap(std::clamp(v0 + d * step, space.lo, space.hi));
                        };
                        const std::array<double, 3> p{
                            snap(std::clamp(c0 + dc * cstep, space.lo, space.hi)), at(y0, dy),
                            at(a0, da)};
                        if (seen.insert(p).second)
                            batch.push_back(SurvivalTable::by_age_class(p[0], p[1], p[2]));
                    }
        }
        result.candidates_evaluated += batch.size();
        kept = best_unique(score_all(batch, target, base_params, init, space.refine_runs,
                                     space.base_seed, space.workers, target.tolerance_points),
                           space.keep);
    }

    result.best = kept.front();
    result.within_tolerance = std::ranges::all_of(
        result.best.fits, [](const RowFit& f) { return f.within_tolerance; });
    return result;
}

std::optional<double> detect_critical_mass(std::span<const ScenarioStats> initial_n_stats) {
    std::vector<const ScenarioStats*> sorted;
    for (const ScenarioStats& s : initial_n_stats) sorted.push_back(&s);
    std::ranges::stable_sort(sorted, {}, &ScenarioStats::axis_value);
    for (const ScenarioStats* s : sorted)
        if (s->pct_extinct < 0.5) return s->axis_value;
    return std::nullopt;
}

}  // namespace foxpop
