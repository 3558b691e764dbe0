#include "foxpop/cli.hpp"

#include "foxpop/config.hpp"
#include "foxpop/csv_io.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace foxpop::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("FOXPOP_SEED");
    if (!raw || !*raw) return std::nullopt;
    std::uint64_t v = 0;
    const std::string_view s(raw);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

namespace {

ConfigDocument load_or_default(const std::optional<fs::path>& path) {
    return path ? load_config(*path) : ConfigDocument{};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

std::string fixed(double x, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

std::string fixed(const std::optional<double>& x, int digits) {
    return x ? fixed(*x, digits) : std::string("n/a");
}

// Maps the project's exception types onto exit statuses.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const EstimationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ConfigDocument cfg = load_or_default(opts.config);
        const std::uint64_t seed = opts.seed.value_or(env_seed().value_or(1));
        RunResult r = run_simulation(cfg.model, cfg.init, seed);

        ensure_dir(opts.out);
        const RunRecord rec{"run", 0.0, 0, seed, r.outcome, r.years(), r.lambda, r.final_n()};
        write_file(opts.out / "run.csv", runs_csv(std::span(&rec, 1)));
        if (opts.trajectories) {
            const TrajectoryEntry t{"run", 0, r.trajectory};
            write_file(opts.out / "trajectory.csv", trajectories_csv(std::span(&t, 1)));
        }
        out << "seed     " << seed << '\n'
            << "outcome  " << to_string(r.outcome) << '\n'
            << "years    " << r.years() << '\n'
            << "final_n  " << r.final_n() << '\n'
            << "lambda   " << fixed(r.lambda, 5) << '\n';
        return kExitOk;
    });
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ConfigDocument cfg = load_or_default(opts.config);
        SweepSpec spec = cfg.sweep.value_or(SweepSpec{});
        if (opts.axis) {
            const auto axis = parse_axis(*opts.axis);
            if (!axis) throw ConfigError("--axis", "unknown axis '" + *opts.axis + "'");
            if (!cfg.sweep || cfg.sweep->axis != *axis) spec.values = default_axis_values(*axis);
            spec.axis = *axis;
        }
        if (opts.runs) spec.runs_per_scenario = *opts.runs;
        if (opts.seed)
            spec.base_seed = *opts.seed;
        else if (auto s = env_seed())
            spec.base_seed = *s;
        spec.validate();

        const SweepResult result =
            run_sweep(spec, cfg.model, cfg.init, opts.workers, opts.trajectories);

        ensure_dir(opts.out);
        const fs::path runs_path = opts.out / "runs.csv";
        write_file(runs_path, runs_csv(result.runs));
        // Scenario statistics are reduced from the persisted per-run file.
        std::ifstream persisted(runs_path);
        if (!persisted) throw IoError("cannot reread " + runs_path.string());
        std::vector<RunRecord> records;
        try {
            records = parse_runs_csv(persisted);
        } catch (const std::invalid_argument& e) {
            throw IoError(runs_path.string() + ": " + e.what());
        }
        const auto stats = aggregate_by_scenario(records);
        write_file(opts.out / "scenarios.csv", scenarios_csv(stats));
        if (opts.trajectories)
            write_file(opts.out / "trajectories.csv", trajectories_csv(result.trajectories));

        out << "axis " << to_string(spec.axis) << ", " << spec.runs_per_scenario
            << " runs/scenario, base seed " << spec.base_seed << '\n';
        out << std::left << std::setw(28) << "scenario" << std::right << std::setw(10)
            << "extinct" << std::setw(11) << "max_limit" << std::setw(12) << "lambda_mean"
            << std::setw(14) << "lambda_median" << '\n';
        for (const ScenarioStats& s : stats)
            out << std::left << std::setw(28) << s.scenario << std::right << std::setw(9)
                << fixed(100.0 * s.pct_extinct, 0) << '%' << std::setw(10)
                << fixed(100.0 * s.pct_max_limit, 0) << '%' << std::setw(12)
                << fixed(s.lambda_mean, 4) << std::setw(14) << fixed(s.lambda_median, 4) << '\n';
        return kExitOk;
    });
}

int cmd_estimate(const EstimateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (opts.method != "bayes" && opts.method != "direct")
            throw ConfigError("--method", "must be bayes or direct");
        const CohortCounts cohort = read_cohort_csv(opts.cohort);

        SurvivalTable table;
        std::optional<SurvivalDiagnostics> diag;
        if (opts.method == "bayes") {
            BayesEstimate est = estimate_bayes(cohort);
            table = est.table;
            diag = std::move(est.diagnostics);
        } else {
            table = direct_estimate(cohort);
        }

        out << "method " << opts.method << '\n';
        for (std::size_t i = 0; i < kNumCells; ++i) {
            out << std::left << std::setw(12) << cell_key(cell_at(i)) << format_real(table.values()[i]);
            if (diag) out << "  raw=" << format_real(diag->raw_values[i]);
            out << '\n';
        }
        if (diag && !diag->clamped_cells.empty()) {
            out << "clamped:";
            for (const Cell& c : diag->clamped_cells) out << ' ' << cell_key(c);
            out << '\n';
        }
        if (opts.out) {
            const json fragment = {{"model", {{"survival", survival_to_json(table)}}},
                                   {"provenance",
                                    {{"tool", "foxpop estimate"},
                                     {"method", opts.method},
                                     {"cohort", opts.cohort.filename().string()}}}};
            write_file(*opts.out, fragment.dump(2) + "\n");
        }
        return kExitOk;
    });
}

int cmd_calibrate(const CalibrateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const ConfigDocument cfg = load_or_default(opts.config);
        std::ifstream in(opts.targets);
        if (!in) throw IoError("cannot read targets file " + opts.targets.string());
        CalibrationTarget target = read_targets_csv(in);
        if (opts.tolerance_points) target.tolerance_points = *opts.tolerance_points;

        const CalibrationResult res = calibrate_defaults(target, opts.search, cfg.model, cfg.init);
        const CandidateScore& best = res.best;

        json achieved = json::array();
        for (const RowFit& f : best.fits)
            achieved.push_back({{"axis", std::string(to_string(f.target.axis))},
                                {"delta", f.target.delta},
                                {"target_extinct", f.target.pct_extinct},
                                {"achieved_extinct", f.achieved_extinct},
                                {"target_max_limit", f.target.pct_max_limit},
                                {"achieved_max_limit", f.achieved_max_limit},
                                {"within_tolerance", f.within_tolerance}});
        const SearchSpace& sp = opts.search;
        const json fragment = {
            {"model", {{"survival", survival_to_json(best.table)}}},
            {"provenance",
             {{"tool", "foxpop calibrate"},
              {"targets", opts.targets.filename().string()},
              {"search",
               {{"lo", sp.lo},
                {"hi", sp.hi},
                {"coarse_step", sp.coarse_step},
                {"coarse_runs", sp.coarse_runs},
                {"cub_refine_levels", sp.cub_refine_levels},
                {"refine_levels", sp.refine_levels},
                {"refine_runs", sp.refine_runs},
                {"keep", sp.keep},
                {"base_seed", sp.base_seed}}},
              {"candidates_evaluated", res.candidates_evaluated},
              {"sse", best.sse},
              {"tolerance_points", target.tolerance_points},
              {"within_tolerance", res.within_tolerance},
              {"achieved", achieved}}}};
        write_file(opts.out, fragment.dump(2) + "\n");

        out << "best table (cub, yearling, adult): "
            << format_real(best.table(AgeClass::Cub, Sex::Female)) << ", "
            << format_real(best.table(AgeClass::Yearling, Sex::Female)) << ", "
            << format_real(best.table(AgeClass::Adult, Sex::Female)) << "  sse "
            << fixed(best.sse, 5) << "  (" << res.candidates_evaluated << " candidates)\n";
        out << std::left << std::setw(20) << "axis" << std::right << std::setw(7) << "delta"
            << std::setw(16) << "extinct t/a" << std::setw(18) << "max_limit t/a" << '\n';
        for (const RowFit& f : best.fits)
            out << std::left << std::setw(20) << to_string(f.target.axis) << std::right
                << std::setw(7) << fixed(f.target.delta, 2) << std::setw(8)
                << fixed(100 * f.target.pct_extinct, 0) << '/' << std::setw(3) << std::left
                << fixed(100 * f.achieved_extinct, 0) << std::right << std::setw(11)
                << fixed(100 * f.target.pct_max_limit, 0) << '/' << std::left << std::setw(3)
                << fixed(100 * f.achieved_max_limit, 0) << std::right
                << (f.within_tolerance ? "" : "  OUT OF TOLERANCE") << '\n';
        if (!res.within_tolerance) {
            err << "warning: best candidate is outside the " << target.tolerance_points
                << "-point tolerance; written anyway\n";
            return kExitCalibration;
        }
        return kExitOk;
    });
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Individual-based Arctic fox population simulator", "foxpop"};
    app.require_subcommand(0, 1);
    bool version = false;
    app.add_flag("--version", version, "Print version and exit");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Simulate one run");
    run_cmd->add_option("--config", run.config, "JSON configuration")->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "Run seed (default: FOXPOP_SEED or 1)");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_flag("--trajectories", run.trajectories, "Also write trajectory.csv");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a one-at-a-time parameter sweep");
    sweep_cmd->add_option("--config", sweep.config, "JSON configuration")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--axis", sweep.axis,
                          "initial-n | cub-survival | yearling-survival | adult-survival");
    sweep_cmd->add_option("--runs", sweep.runs, "Runs per scenario");
    sweep_cmd->add_option("--seed", sweep.seed, "Base seed");
    sweep_cmd->add_option("--out", sweep.out, "Output directory");
    sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)");
    sweep_cmd->add_flag("--trajectories", sweep.trajectories, "Also write trajectories.csv");

    EstimateOptions est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate a survival table from cohort counts");
    est_cmd->add_option("--cohort", est.cohort, "Cohort CSV")->required();
    est_cmd->add_option("--method", est.method, "bayes | direct");
    est_cmd->add_option("--out", est.out, "Write a config fragment here");

    CalibrateOptions cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "Fit the default survival table to targets");
    cal_cmd->add_option("--config", cal.config, "Base JSON configuration")->check(CLI::ExistingFile);
    cal_cmd->add_option("--targets", cal.targets, "Targets CSV")->required();
    cal_cmd->add_option("--out", cal.out, "Output config fragment")->required();
    cal_cmd->add_option("--lo", cal.search.lo, "Lowest survival probability searched");
    cal_cmd->add_option("--hi", cal.search.hi, "Highest survival probability searched");
    cal_cmd->add_option("--coarse-step", cal.search.coarse_step, "Coarse grid step");
    cal_cmd->add_option("--coarse-runs", cal.search.coarse_runs, "Runs per row on the coarse grid");
    cal_cmd->add_option("--refine-levels", cal.search.refine_levels, "Step-halving refinements");
    cal_cmd->add_option("--cub-refine-levels", cal.search.cub_refine_levels,
                        "Cub-only step-halving refinements per (yearling, adult) pair");
    cal_cmd->add_option("--runs", cal.search.refine_runs, "Runs per row while refining");
    cal_cmd->add_option("--keep", cal.search.keep, "Candidates kept between stages");
    cal_cmd->add_option("--seed", cal.search.base_seed, "Base seed of the scoring runs");
    cal_cmd->add_option("--workers", cal.search.workers, "Worker threads (0 = all cores)");
    cal_cmd->add_option("--tolerance", cal.tolerance_points, "Tolerance in percentage points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (version) {
        out << "foxpop " << kVersion << '\n';
        return kExitOk;
    }
    if (run_cmd->parsed()) return cmd_run(run, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, out, err);
    if (est_cmd->parsed()) return cmd_estimate(est, out, err);
    if (cal_cmd->parsed()) return cmd_calibrate(cal, out, err);
    out << app.help();
    return kExitConfig;
}

}  // namespace foxpop::cli
