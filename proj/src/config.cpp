#include "foxpop/config.hpp"

#include "foxpop/csv_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace foxpop {

using nlohmann::json;

namespace {

void check_object(const json& j, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (std::string_view a : allowed) known = known || key == a;
        if (!known)
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

double get_real(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
    return v;
}

double get_probability(const json& j, const std::string& path) {
    const double v = get_real(j, path);
    if (v < 0.0 || v > 1.0) throw ConfigError(path, "must lie in [0, 1]");
    return v;
}

template <class Int>
Int get_int(const json& j, const std::string& path) {
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()))
            throw ConfigError(path, "out of range");
        return static_cast<Int>(v);
    }
    if (j.is_number_integer()) {
        const auto v = j.get<std::int64_t>();
        if constexpr (std::is_unsigned_v<Int>) {
            if (v < 0) throw ConfigError(path, "must be non-negative");
        } else if (v < std::numeric_limits<Int>::min() || v > std::numeric_limits<Int>::max()) {
            throw ConfigError(path, "out of range");
        }
        return static_cast<Int>(v);
    }
    throw ConfigError(path, "must be an integer");
}

void parse_survival(const json& j, SurvivalTable& table) {
    std::array<std::string, kNumCells> names;
    for (std::size_t i = 0; i < kNumCells; ++i) names[i] = cell_key(cell_at(i));
    check_object(j, "model.survival",
                 {names[0], names[1], names[2], names[3], names[4], names[5]});
    auto p = table.values();
    for (std::size_t i = 0; i < kNumCells; ++i)
        if (j.contains(names[i]))
            p[i] = get_probability(j.at(names[i]), "model.survival." + names[i]);
    table = SurvivalTable(p);
}

void parse_repro(const json& j, ReproParams& r) {
    const std::string base = "model.repro";
    check_object(j, base, {"p_adult", "p_yearling", "litter_mean", "litter_sd", "p_sex_female"});
    if (j.contains("p_adult")) r.p_repro_adult = get_probability(j["p_adult"], base + ".p_adult");
    if (j.contains("p_yearling"))
        r.p_repro_yearling = get_probability(j["p_yearling"], base + ".p_yearling");
    if (j.contains("litter_mean")) r.litter_mean = get_real(j["litter_mean"], base + ".litter_mean");
    if (j.contains("litter_sd")) {
        r.litter_sd = get_real(j["litter_sd"], base + ".litter_sd");
        if (r.litter_sd < 0) throw ConfigError(base + ".litter_sd", "must be >= 0");
    }
    if (j.contains("p_sex_female"))
        r.p_sex_female = get_probability(j["p_sex_female"], base + ".p_sex_female");
}

void parse_ranges(const json& j, std::vector<RangeAttributes>& out) {
    if (!j.is_array()) throw ConfigError("model.ranges", "must be an array");
    out.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string path = "model.ranges[" + std::to_string(i) + "]";
        const json& e = j[i];
        check_object(e, path, {"x", "y", "food"});
        RangeAttributes a;
        if (e.contains("x")) a.x = get_real(e["x"], path + ".x");
        if (e.contains("y")) a.y = get_real(e["y"], path + ".y");
        if (e.contains("food")) {
            if (!e["food"].is_string()) throw ConfigError(path + ".food", "must be a string");
            const auto f = e["food"].get<std::string>();
            if (f == "poor")
                a.food = FoodLevel::Poor;
            else if (f == "medium")
                a.food = FoodLevel::Medium;
            else if (f == "rich")
                a.food = FoodLevel::Rich;
            else
                throw ConfigError(path + ".food", "must be poor, medium or rich");
        }
        out.push_back(a);
    }
}

void parse_model(const json& j, ModelParams& m) {
    check_object(j, "model",
                 {"num_ranges", "survival", "repro", "max_age", "extinction_threshold",
                  "max_population", "horizon", "burn_in", "ranges"});
    if (j.contains("num_ranges")) m.num_ranges = get_int<int>(j["num_ranges"], "model.num_ranges");
    if (j.contains("survival")) parse_survival(j["survival"], m.survival);
    if (j.contains("repro")) parse_repro(j["repro"], m.repro);
    if (j.contains("max_age")) m.max_age = get_int<int>(j["max_age"], "model.max_age");
    if (j.contains("extinction_threshold"))
        m.extinction_threshold =
            get_int<std::size_t>(j["extinction_threshold"], "model.extinction_threshold");
    if (j.contains("max_population"))
        m.max_population = get_int<std::size_t>(j["max_population"], "model.max_population");
    if (j.contains("horizon")) m.horizon = get_int<int>(j["horizon"], "model.horizon");
    if (j.contains("burn_in")) m.burn_in = get_int<int>(j["burn_in"], "model.burn_in");
    if (j.contains("ranges")) parse_ranges(j["ranges"], m.range_attributes);
}

void parse_init(const json& j, InitParams& i) {
    check_object(j, "init",
                 {"n0", "prop_adult", "prop_yearling", "prop_cub", "adult_age_min",
                  "adult_age_max"});
    if (j.contains("n0")) i.n0 = get_int<int>(j["n0"], "init.n0");
    if (j.contains("prop_adult")) i.prop_adult = get_real(j["prop_adult"], "init.prop_adult");
    if (j.contains("prop_yearling"))
        i.prop_yearling = get_real(j["prop_yearling"], "init.prop_yearling");
    if (j.contains("prop_cub")) i.prop_cub = get_real(j["prop_cub"], "init.prop_cub");
    if (j.contains("adult_age_min"))
        i.adult_age_min = get_int<int>(j["adult_age_min"], "init.adult_age_min");
    if (j.contains("adult_age_max"))
        i.adult_age_max = get_int<int>(j["adult_age_max"], "init.adult_age_max");
}

SweepSpec parse_sweep(const json& j) {
    check_object(j, "sweep", {"axis", "values", "runs_per_scenario", "base_seed"});
    SweepSpec s;
    if (j.contains("axis")) {
        if (!j["axis"].is_string()) throw ConfigError("sweep.axis", "must be a string");
        const auto axis = parse_axis(j["axis"].get<std::string>());
        if (!axis) throw ConfigError("sweep.axis", "unknown axis");
        s.axis = *axis;
    }
    if (j.contains("values")) {
        if (!j["values"].is_array()) throw ConfigError("sweep.values", "must be an array");
        s.values.clear();
        for (std::size_t k = 0; k < j["values"].size(); ++k)
            s.values.push_back(get_real(j["values"][k], "sweep.values[" + std::to_string(k) + "]"));
    } else {
        s.values = default_axis_values(s.axis);
    }
    if (j.contains("runs_per_scenario"))
        s.runs_per_scenario = get_int<int>(j["runs_per_scenario"], "sweep.runs_per_scenario");
    if (j.contains("base_seed"))
        s.base_seed = get_int<std::uint64_t>(j["base_seed"], "sweep.base_seed");
    s.validate();
    return s;
}

}  // namespace

ConfigDocument parse_config(const json& doc) {
    check_object(doc, "", {"model", "init", "sweep", "provenance"});
    ConfigDocument out;
    if (doc.contains("model")) parse_model(doc["model"], out.model);
    if (doc.contains("init")) parse_init(doc["init"], out.init);
    if (doc.contains("sweep")) out.sweep = parse_sweep(doc["sweep"]);
    out.model.validate();
    out.init.validate();
    return out;
}

ConfigDocument parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

ConfigDocument load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json survival_to_json(const SurvivalTable& table) {
    json j = json::object();
    for (std::size_t i = 0; i < kNumCells; ++i) j[cell_key(cell_at(i))] = table.values()[i];
    return j;
}

json to_json(const ConfigDocument& doc) {
    const ModelParams& m = doc.model;
    json model = {
        {"num_ranges", m.num_ranges},
        {"survival", survival_to_json(m.survival)},
        {"repro",
         {{"p_adult", m.repro.p_repro_adult},
          {"p_yearling", m.repro.p_repro_yearling},
          {"litter_mean", m.repro.litter_mean},
          {"litter_sd", m.repro.litter_sd},
          {"p_sex_female", m.repro.p_sex_female}}},
        {"max_age", m.max_age},
        {"extinction_threshold", m.extinction_threshold},
        {"max_population", m.max_population},
        {"horizon", m.horizon},
        {"burn_in", m.burn_in},
    };
    if (!m.range_attributes.empty()) {
        json ranges = json::array();
        for (const RangeAttributes& a : m.range_attributes) {
            const char* food = a.food == FoodLevel::Poor     ? "poor"
                               : a.food == FoodLevel::Rich ? "rich"
                                                             : "medium";
            ranges.push_back({{"x", a.x}, {"y", a.y}, {"food", food}});
        }
        model["ranges"] = ranges;
    }
    const InitParams& i = doc.init;
    json out = {{"model", model},
                {"init",
                 {{"n0", i.n0},
                  {"prop_adult", i.prop_adult},
                  {"prop_yearling", i.prop_yearling},
                  {"prop_cub", i.prop_cub},
                  {"adult_age_min", i.adult_age_min},
                  {"adult_age_max", i.adult_age_max}}}};
    if (doc.sweep)
        out["sweep"] = {{"axis", std::string(to_string(doc.sweep->axis))},
                        {"values", doc.sweep->values},
                        {"runs_per_scenario", doc.sweep->runs_per_scenario},
                        {"base_seed", doc.sweep->base_seed}};
    return out;
}

std::filesystem::path default_config_path() {
    return std::filesystem::path(FOXPOP_SOURCE_DIR) / "config" / "default.json";
}

}  // namespace foxpop
