#include "foxpop/config.hpp"
#include "foxpop/csv_io.hpp"

#include <doctest.h>

#include <string>

using namespace foxpop;

namespace {

std::string error_path(std::string_view text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty document gives the built-in defaults") {
    const ConfigDocument d = parse_config_text("{}");
    CHECK(d.model.num_ranges == 60);
    CHECK(d.model.survival == default_survival_table());
    CHECK(d.init == InitParams{});
    CHECK_FALSE(d.sweep.has_value());
}

TEST_CASE("shipped default configuration equals the built-in defaults") {
    const ConfigDocument d = load_config(default_config_path());
    const ModelParams m;
    CHECK(d.model.survival == m.survival);
    CHECK(d.model.num_ranges == m.num_ranges);
    CHECK(d.model.repro.p_repro_adult == m.repro.p_repro_adult);
    CHECK(d.model.repro.p_repro_yearling == m.repro.p_repro_yearling);
    CHECK(d.model.repro.litter_mean == m.repro.litter_mean);
    CHECK(d.model.repro.litter_sd == m.repro.litter_sd);
    CHECK(d.model.max_age == m.max_age);
    CHECK(d.model.extinction_threshold == m.extinction_threshold);
    CHECK(d.model.max_population == m.max_population);
    CHECK(d.model.horizon == m.horizon);
    CHECK(d.model.burn_in == m.burn_in);
    CHECK(d.init == InitParams{});
    REQUIRE(d.sweep.has_value());
    CHECK(d.sweep->base_seed == kDefaultBaseSeed);
    CHECK(d.sweep->runs_per_scenario == 100);
}

TEST_CASE("partial documents override only what they name") {
    const ConfigDocument d = parse_config_text(R"({
        "model": {"survival": {"cub_f": 0.4}, "repro": {"p_adult": 0.7}, "horizon": 20},
        "init": {"n0": 220}
    })");
    CHECK(d.model.survival(AgeClass::Cub, Sex::Female) == 0.4);
    CHECK(d.model.survival(AgeClass::Cub, Sex::Male) ==
          default_survival_table()(AgeClass::Cub, Sex::Male));
    CHECK(d.model.repro.p_repro_adult == 0.7);
    CHECK(d.model.repro.p_repro_yearling == 0.1);
    CHECK(d.model.horizon == 20);
    CHECK(d.init.n0 == 220);
    CHECK(d.init.prop_adult == 0.24);
}

TEST_CASE("unknown keys are reported with their path") {
    CHECK(error_path(R"({"model": {"foo": 1}})") == "model.foo");
    CHECK(error_path(R"({"model": {"survival": {"cub": 0.5}}})") == "model.survival.cub");
    CHECK(error_path(R"({"model": {"repro": {"litter": 4}}})") == "model.repro.litter");
    CHECK(error_path(R"({"modle": {}})") == "modle");
    CHECK(error_path(R"({"sweep": {"axis": "cub-survival", "extra": 1}})") == "sweep.extra");
}

TEST_CASE("invalid values are rejected with their path") {
    CHECK(error_path(R"({"init": {"prop_cub": 0.7}})") == "init.prop_*");
    CHECK(error_path(R"({"model": {"survival": {"adult_m": 1.5}}})") == "model.survival.adult_m");
    CHECK(error_path(R"({"model": {"num_ranges": "sixty"}})") == "model.num_ranges");
    CHECK(error_path(R"({"model": {"repro": {"p_yearling": -0.1}}})") == "model.repro.p_yearling");
    CHECK(error_path(R"({"sweep": {"axis": "pup-survival"}})") == "sweep.axis");
    CHECK(error_path("[1, 2]") == "<root>");
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
}

TEST_CASE("range attributes are parsed and inert") {
    const ConfigDocument d = parse_config_text(
        R"({"model": {"num_ranges": 2, "ranges": [{"x": 1, "y": 2, "food": "rich"}, {}]}})");
    REQUIRE(d.model.range_attributes.size() == 2);
    CHECK(d.model.range_attributes[0].x == 1.0);
    CHECK(d.model.range_attributes[0].food == FoodLevel::Rich);
    CHECK(error_path(R"({"model": {"ranges": [{"food": "lots"}]}})") == "model.ranges[0].food");
}

TEST_CASE("documents round trip through JSON") {
    ConfigDocument d;
    d.model.survival = SurvivalTable::by_age_class(0.1, 0.2, 0.3);
    d.model.horizon = 30;
    d.init.n0 = 70;
    d.sweep = SweepSpec{SweepAxis::AdultSurvival, {-0.1, 0.1}, 5, 99};
    const ConfigDocument back = parse_config(to_json(d));
    CHECK(back.model.survival == d.model.survival);
    CHECK(back.model.horizon == 30);
    CHECK(back.init == d.init);
    REQUIRE(back.sweep.has_value());
    CHECK(back.sweep->axis == SweepAxis::AdultSurvival);
    CHECK(back.sweep->values == d.sweep->values);
    CHECK(back.sweep->base_seed == 99);
}

TEST_CASE("missing config file is an I/O error") {
    CHECK_THROWS_AS(load_config("/nonexistent/foxpop.json"), IoError);
}

}
