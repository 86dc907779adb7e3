#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "greenmesh/errors.hpp"
#include "greenmesh/scenario.hpp"
#include "greenmesh/utc.hpp"
#include "test_support.hpp"

using namespace greenmesh;
using namespace greenmesh::scenario;

TEST(Scenario, BundledNames) {
    const auto names = bundled_scenario_names();
    for (const auto* n : {"paper-week", "single-sunny", "single-cloudy", "plant-growth"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
        EXPECT_NO_THROW(load_scenario(n)) << n;
    }
    EXPECT_FALSE(bundled_scenario_text("nope"));
}

TEST(Scenario, PaperWeekShape) {
    const auto s = load_scenario("paper-week");
    using field::DayType;
    EXPECT_EQ(s.days, (std::vector<DayType>{DayType::cloudy, DayType::sunny, DayType::sunny, DayType::sunny,
                                            DayType::sunny, DayType::cloudy, DayType::sunny}));
    EXPECT_EQ(date_string(s.start_day), "2017-01-22");
    EXPECT_EQ(s.stations.size(), 13u);
    EXPECT_EQ(s.end_time() - s.start_time(), 7 * kSecondsPerDay);
    EXPECT_EQ(s.day_profiles()[0].type, DayType::cloudy);
    EXPECT_EQ(s.plants.final_height_m, 0.0);
}

TEST(Scenario, MinimalDocumentUsesDefaults) {
    const auto s = parse_scenario(R"({"name":"m","seed":5,"days":["sunny"]})");
    EXPECT_EQ(s.seed, 5u);
    EXPECT_EQ(s.schedule.trigger_period_s, 20);
    EXPECT_EQ(s.reconfig.window, 100u);
    EXPECT_EQ(s.reconfig.threshold, 0.5);
    EXPECT_FALSE(s.link.fixed_probability);
    EXPECT_EQ(s.analysis.debounce_s, 0);
}

TEST(Scenario, Overrides) {
    const auto s = parse_scenario(R"({
        "name": "o", "seed": 1, "start_date": "2017-03-01", "days": ["cloudy", "sunny"],
        "stations": [1, 2, 3],
        "profiles": {"sunny": {"vertical_gradient_c": 6.5}},
        "schedule": {"retries": 0},
        "radio": {"fixed_probability": 0.9, "relocated": [2], "reconfig": {"enabled": false}},
        "plants": {"growth_days": 30},
        "analysis": {"debounce_s": 60, "wind_calibrated": true,
                     "wind_calibration": [[0, 0], [1, 0.5], [5, 3]]}
    })");
    EXPECT_EQ(s.profiles.sunny.vertical_gradient_c, 6.5);
    EXPECT_EQ(s.schedule.retries, 0);
    EXPECT_EQ(*s.link.fixed_probability, 0.9);
    EXPECT_EQ(s.link.relocated, (std::vector<std::uint8_t>{2}));
    EXPECT_FALSE(s.reconfig.enabled);
    EXPECT_EQ(s.plants.final_height_m, 2.1);
    EXPECT_EQ(s.plants.growth_days, 30.0);
    EXPECT_EQ(s.plants.start, day_start(parse_date("2017-03-01")));
    EXPECT_TRUE(s.analysis.wind_calibration.calibrated);
    EXPECT_EQ(s.analysis.wind_calibration.points.size(), 3u);
}

TEST(Scenario, ValidationErrors) {
    const char* bad[] = {
        R"({"seed":1,"days":["sunny"]})",
        R"({"name":"x","days":["sunny"]})",
        R"({"name":"x","seed":-4,"days":["sunny"]})",
        R"({"name":"x","seed":1,"days":[]})",
        R"({"name":"x","seed":1,"days":["rainy"]})",
        R"({"name":"x","seed":1,"days":["sunny"],"colour":"red"})",
        R"({"name":"x","seed":1,"days":["sunny"],"radio":{"foliage":1}})",
        R"({"name":"x","seed":1,"days":["sunny"],"stations":[1,1]})",
        R"({"name":"x","seed":1,"days":["sunny"],"stations":[44]})",
        R"({"name":"x","seed":1,"days":["sunny"],"schedule":{"poll_timeout_ms":400}})",
        R"({"name":"x","seed":1,"days":["sunny"],"schedule":{"settle_delay_s":25}})",
        R"({"name":"x","seed":1,"days":["sunny"],"radio":{"fixed_probability":2}})",
        R"({"name":"x","seed":1,"days":["sunny"],"plants":{"growth_days":0}})",
        R"({"name":"x","seed":1,"days":["sunny"],"start_date":"2017-13-01"})",
        R"({"name":"x","seed":1,"days":["sunny"],"profiles":{"cloudy":{"vertical_gradient_c":-2}}})",
        R"({"name":"x","seed":1,"days":["sunny"],"analysis":{"wind_calibration":[[0,1],[0,2]]}})",
        R"({"name":"x","seed":1,"days":["sunny"],"radio":{"relocated":[5]},"stations":[1,2]})",
        R"({"name":"x","seed":"1","days":["sunny"]})",
        R"(not json)",
    };
    for (const char* doc : bad) EXPECT_THROW(parse_scenario(doc), ConfigError) << doc;
}

TEST(Scenario, LoadFromFile) {
    testsupport::TempDir dir;
    const auto path = dir / "s.json";
    {
        std::ofstream out(path);
        out << R"({"name":"file","seed":3,"days":["cloudy"]})";
    }
    EXPECT_EQ(load_scenario(path.string()).name, "file");
    EXPECT_THROW(load_scenario((dir / "absent.json").string()), StorageError);
}

TEST(Utc, Dates) {
    EXPECT_EQ(date_string(parse_date("2017-01-22")), "2017-01-22");
    EXPECT_EQ(parse_date("1970-01-01"), 0);
    EXPECT_EQ(parse_date("2017-01-22"), 17188);
    EXPECT_EQ(datetime_string(day_start(17188) + 9 * 3600 + 61), "2017-01-22T09:01:01Z");
    EXPECT_EQ(day_index(-1), -1);
    EXPECT_DOUBLE_EQ(hour_of_day(day_start(17188) + 5400), 1.5);
    EXPECT_THROW(parse_date("2017-02-30"), ConfigError);
    EXPECT_THROW(parse_date("17-1-2"), ConfigError);
}
