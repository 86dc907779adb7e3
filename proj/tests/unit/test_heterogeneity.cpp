#include <gtest/gtest.h>

#include <algorithm>

#include "greenmesh/errors.hpp"
#include "greenmesh/heterogeneity.hpp"
#include "test_support.hpp"

using namespace greenmesh;
using namespace greenmesh::heterogeneity;
using testsupport::planes_snapshot;
using testsupport::station_at;

TEST(WeightedMean, Examples) {
    EXPECT_DOUBLE_EQ(weighted_vertical_mean(18, 22, 24), 21.5);
    EXPECT_DOUBLE_EQ(weighted_vertical_mean(7.25, 7.25, 7.25), 7.25);
    EXPECT_DOUBLE_EQ(weighted_vertical_mean(0, 10, 20), 10.0);
    EXPECT_THROW(weighted_vertical_mean(std::nan(""), 1, 2), DomainError);
}

TEST(WeightedMeanProperty, BoundedByInputs) {
    for (double a = -5; a <= 5; a += 2.5) {
        for (double b = -5; b <= 5; b += 2.5) {
            for (double c = -5; c <= 5; c += 2.5) {
                const double m = weighted_vertical_mean(a, b, c);
                EXPECT_GE(m, std::min({a, b, c}));
                EXPECT_LE(m, std::max({a, b, c}));
            }
        }
    }
}

TEST(Limits, TableValues) {
    EXPECT_EQ(homogeneity_limit(ParameterKind::air_temp, 21.5), 2.0);
    EXPECT_EQ(homogeneity_limit(ParameterKind::mean_radiant_temp, 30.0), 10.0);
    EXPECT_DOUBLE_EQ(*homogeneity_limit(ParameterKind::air_velocity, 1.0), 0.45);
    EXPECT_EQ(homogeneity_limit(ParameterKind::vapour_pressure, 0.1), 0.45);
    EXPECT_EQ(homogeneity_limit(ParameterKind::vapour_pressure, 7.0), 0.45);
}

TEST(Limits, TemperatureValidityWindow) {
    EXPECT_FALSE(homogeneity_limit(ParameterKind::air_temp, 0.0));
    EXPECT_FALSE(homogeneity_limit(ParameterKind::air_temp, -3.0));
    EXPECT_FALSE(homogeneity_limit(ParameterKind::mean_radiant_temp, 50.0));
    EXPECT_TRUE(homogeneity_limit(ParameterKind::air_temp, 49.9));

    const auto v = assess_vertical(planes_snapshot({-4.0, -1.0, 3.0}), ParameterKind::air_temp);
    EXPECT_EQ(v.classification, Classification::not_applicable);
    EXPECT_FALSE(v.heterogeneous());
    EXPECT_FALSE(v.limit);
}

TEST(Vertical, HeterogeneousPlanes) {
    const auto v = assess_vertical(planes_snapshot({19.0, 21.5, 24.0}), ParameterKind::air_temp);
    EXPECT_DOUBLE_EQ(v.mean, 21.5);
    ASSERT_TRUE(v.limit);
    EXPECT_DOUBLE_EQ(v.mean - *v.limit, 19.5);
    EXPECT_DOUBLE_EQ(v.mean + *v.limit, 23.5);
    ASSERT_EQ(v.offenders.size(), 2u);
    EXPECT_EQ(v.offenders[0].location, static_cast<std::uint8_t>(Height::ankle));
    EXPECT_DOUBLE_EQ(v.offenders[0].value, 19.0);
    EXPECT_EQ(v.offenders[1].location, static_cast<std::uint8_t>(Height::head));
    EXPECT_DOUBLE_EQ(v.offenders[1].value, 24.0);
    EXPECT_TRUE(v.heterogeneous());
    EXPECT_FALSE(v.homogeneous());
}

TEST(Vertical, HomogeneousPlanes) {
    EXPECT_TRUE(assess_vertical(planes_snapshot({20.0, 20.0, 20.0}), ParameterKind::air_temp).homogeneous());
    const auto v = assess_vertical(planes_snapshot({20.0, 21.0, 22.0}), ParameterKind::air_temp);
    EXPECT_DOUBLE_EQ(v.mean, 21.0);
    EXPECT_TRUE(v.homogeneous());
    EXPECT_EQ(v.classification, Classification::homogeneous);
}

TEST(Vertical, PlaneMeansAcrossStations) {
    Snapshot snap;
    snap.stations.push_back(station_at(1, {18.0, 20.0, 22.0}));
    snap.stations.push_back(station_at(2, {20.0, 22.0, 26.0}));
    const auto v = assess_vertical(snap, ParameterKind::air_temp);
    ASSERT_EQ(v.values.size(), 3u);
    EXPECT_DOUBLE_EQ(v.values[0].value, 19.0);
    EXPECT_DOUBLE_EQ(v.values[1].value, 21.0);
    EXPECT_DOUBLE_EQ(v.values[2].value, 24.0);
    EXPECT_DOUBLE_EQ(v.mean, (19.0 + 42.0 + 24.0) / 4.0);
}

TEST(Horizontal, OutlierStation) {
    Snapshot snap;
    for (std::uint8_t id = 1; id <= 11; ++id) snap.stations.push_back(station_at(id, {22.0, 22.0, 22.0}));
    snap.stations.push_back(station_at(12, {19.5, 19.5, 19.5}));
    const auto v = assess_horizontal(snap, ParameterKind::air_temp);
    const double mean = (11 * 22.0 + 19.5) / 12.0;
    EXPECT_NEAR(v.mean, 21.79, 0.005);
    EXPECT_DOUBLE_EQ(v.mean, mean);
    EXPECT_NEAR(v.mean - *v.limit, 19.79, 0.005);
    ASSERT_EQ(v.offenders.size(), 1u);
    EXPECT_EQ(v.offenders[0].location, 12);
    EXPECT_TRUE(v.heterogeneous());

    snap.stations.back() = station_at(12, {20.5, 20.5, 20.5});
    EXPECT_TRUE(assess_horizontal(snap, ParameterKind::air_temp).homogeneous());
}

TEST(Horizontal, IdenticalStations) {
    EXPECT_TRUE(assess_horizontal(planes_snapshot({18.0, 22.0, 26.0}), ParameterKind::air_temp).homogeneous());
}

TEST(Horizontal, UsesWeightedStationMeans) {
    Snapshot snap;
    snap.stations.push_back(station_at(3, {18.0, 22.0, 24.0}));
    const auto v = assess_horizontal(snap, ParameterKind::air_temp);
    ASSERT_EQ(v.values.size(), 1u);
    EXPECT_DOUBLE_EQ(v.values[0].value, 21.5);
}

TEST(Missing, StationsAndPlanesAreExcluded) {
    auto snap = planes_snapshot({20.0, 21.0, 22.0});
    snap.stations[4].heights = {};              // whole station lost
    snap.stations[7].heights[2].reset();        // one head probe lost
    const auto h = assess_horizontal(snap, ParameterKind::air_temp);
    EXPECT_EQ(h.values.size(), 10u);
    EXPECT_EQ(h.excluded, (std::vector<std::uint8_t>{5, 8}));

    const auto v = assess_vertical(snap, ParameterKind::air_temp);
    EXPECT_EQ(v.values.size(), 3u);
    EXPECT_TRUE(v.excluded.empty());

    for (auto& s : snap.stations) s.heights[2].reset();
    const auto v2 = assess_vertical(snap, ParameterKind::air_temp);
    EXPECT_EQ(v2.excluded, (std::vector<std::uint8_t>{2}));
}

TEST(Missing, EmptySnapshotIsError) {
    Snapshot snap;
    snap.stations.push_back({});
    EXPECT_FALSE(has_data(snap));
    EXPECT_THROW(assess_vertical(snap, ParameterKind::air_temp), DomainError);
    EXPECT_THROW(assess_horizontal(snap, ParameterKind::air_temp), DomainError);
}

TEST(Independence, AirHeterogeneousRadiantHomogeneous) {
    Snapshot snap;
    for (std::uint8_t id = 1; id <= 12; ++id) {
        const double shift = id == 11 ? -4.0 : 0.0;
        snap.stations.push_back(station_at(id, {17.0 + shift, 21.0 + shift, 25.0 + shift}, 26.0 + shift));
    }
    EXPECT_TRUE(assess_vertical(snap, ParameterKind::air_temp).heterogeneous());
    EXPECT_TRUE(assess_horizontal(snap, ParameterKind::air_temp).heterogeneous());
    EXPECT_TRUE(assess_vertical(snap, ParameterKind::mean_radiant_temp).homogeneous());
    EXPECT_TRUE(assess_horizontal(snap, ParameterKind::mean_radiant_temp).homogeneous());
}

TEST(Property, TranslationInvariance) {
    const std::array<std::array<double, 3>, 4> profiles{{{19.0, 21.5, 24.0}, {20.0, 21.0, 22.0},
                                                         {15.0, 21.0, 22.0}, {21.0, 21.0, 23.95}}};
    for (const auto& prof : profiles) {
        for (double shift : {-5.0, 0.5, 3.0, 10.0}) {
            auto a = planes_snapshot(prof);
            a.stations[2] = station_at(3, {prof[0] + 1.9, prof[1] + 2.2, prof[2] + 2.4});
            auto b = a;
            for (auto& s : b.stations) {
                for (auto& h : s.heights) {
                    h->air_temp += shift;
                    h->mean_radiant_temp += shift;
                    h->vapour_pressure += shift / 10.0;
                }
            }
            for (auto kind : {ParameterKind::air_temp, ParameterKind::mean_radiant_temp,
                              ParameterKind::vapour_pressure}) {
                for (auto axis : {Axis::vertical, Axis::horizontal}) {
                    EXPECT_EQ(assess(a, kind, axis).classification, assess(b, kind, axis).classification)
                        << to_string(kind) << " " << to_string(axis) << " shift " << shift;
                }
            }
        }
    }
}

TEST(Property, OffenderSymmetry) {
    for (double d : {0.5, 1.9, 2.1, 3.0, 7.0}) {
        Snapshot up;
        Snapshot down;
        for (std::uint8_t id = 1; id <= 12; ++id) {
            const double dev = id == 6 ? d : 0.0;
            up.stations.push_back(station_at(id, {20.0 + dev, 20.0 + dev, 20.0 + dev}));
            down.stations.push_back(station_at(id, {20.0 - dev, 20.0 - dev, 20.0 - dev}));
        }
        const auto a = assess_horizontal(up, ParameterKind::air_temp);
        const auto b = assess_horizontal(down, ParameterKind::air_temp);
        EXPECT_EQ(a.classification, b.classification);
        EXPECT_EQ(a.offenders.size(), b.offenders.size());
        EXPECT_NEAR(a.mean - 20.0, 20.0 - b.mean, 1e-12);
    }
}

TEST(Intervals, Runs) {
    std::vector<Snapshot> series;
    const std::array<bool, 12> het{false, true, true, false, false, true, false, true, true, true, false, false};
    for (std::size_t i = 0; i < het.size(); ++i) {
        series.push_back(planes_snapshot(het[i] ? std::array<double, 3>{17.0, 21.0, 25.0}
                                                : std::array<double, 3>{21.0, 21.0, 21.0},
                                         static_cast<std::int64_t>(20 * i)));
    }
    const auto raw = heterogeneity_intervals(series, ParameterKind::air_temp, Axis::vertical);
    ASSERT_EQ(raw.size(), 3u);
    EXPECT_EQ(raw[0].start, 20);
    EXPECT_EQ(raw[0].end, 40);
    EXPECT_EQ(raw[1].start, 100);
    EXPECT_EQ(raw[1].end, 100);
    EXPECT_EQ(raw[2].start, 140);
    EXPECT_EQ(raw[2].end, 180);
    EXPECT_EQ(raw[2].duration(), 40);

    // gaps of 60 s and 40 s; a gap equal to the debounce is kept
    EXPECT_EQ(heterogeneity_intervals(series, ParameterKind::air_temp, Axis::vertical, 40).size(), 3u);
    EXPECT_EQ(heterogeneity_intervals(series, ParameterKind::air_temp, Axis::vertical, 41).size(), 2u);
    const auto merged = heterogeneity_intervals(series, ParameterKind::air_temp, Axis::vertical, 61);
    ASSERT_EQ(merged.size(), 1u);
    EXPECT_EQ(merged[0].start, 20);
    EXPECT_EQ(merged[0].end, 180);

    EXPECT_TRUE(heterogeneity_intervals(series, ParameterKind::mean_radiant_temp, Axis::vertical).empty());
}

TEST(Intervals, EmptySnapshotsDoNotBreakRuns) {
    std::vector<Snapshot> series;
    series.push_back(planes_snapshot({17.0, 21.0, 25.0}, 0));
    Snapshot gap;
    gap.timestamp = 20;
    gap.stations.push_back({});
    series.push_back(gap);
    series.push_back(planes_snapshot({17.0, 21.0, 25.0}, 40));
    const auto iv = heterogeneity_intervals(series, ParameterKind::air_temp, Axis::vertical);
    ASSERT_EQ(iv.size(), 1u);
    EXPECT_EQ(iv[0].end, 40);
}

TEST(Intervals, AllHomogeneous) {
    std::vector<Snapshot> series;
    for (int i = 0; i < 50; ++i) series.push_back(planes_snapshot({20.0, 20.5, 21.0}, i * 20));
    EXPECT_TRUE(heterogeneity_intervals(series, ParameterKind::air_temp, Axis::vertical).empty());
    EXPECT_TRUE(heterogeneity_intervals(series, ParameterKind::air_temp, Axis::horizontal).empty());
}

TEST(Kinds, NamesRoundTrip) {
    for (auto k : kAllKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
    EXPECT_THROW(parse_kind("humidex"), ConfigError);
}
