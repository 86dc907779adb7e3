#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>

#include "greenmesh/errors.hpp"
#include "greenmesh/rng.hpp"
#include "greenmesh/store.hpp"
#include "greenmesh/utc.hpp"
#include "test_support.hpp"

using namespace greenmesh;
using namespace greenmesh::store;
using testsupport::TempDir;

namespace {

constexpr std::int64_t kDay = 17189;
const std::vector<std::uint8_t> kStations{1, 2, 3};

record::MeasurementRecord rec(std::uint8_t station, std::uint32_t seq, UtcSeconds t, bool missing = false) {
    if (missing) return record::missing_record(station, seq, static_cast<std::uint64_t>(t), 0);
    record::MeasurementRecord r;
    r.station = station;
    r.sequence = seq;
    r.timestamp = static_cast<std::uint64_t>(t);
    for (std::size_t i = 0; i < r.readings.size(); ++i) r.readings[i] = static_cast<std::int32_t>(seq * 100 + i);
    r.uvi_centi = 120;
    r.rssi_deci = -650;
    r.hops = 1;
    return r;
}

}  // namespace

TEST(Sha256, KnownVectors) {
    EXPECT_EQ(sha256_hex({}), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string abc = "abc";
    EXPECT_EQ(sha256_hex({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()}),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Sha256 h;
    h.update("a");
    const auto partial = h.hex();
    h.update("bc");
    EXPECT_EQ(h.hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_NE(partial, h.hex());
}

TEST(Layout, Names) {
    EXPECT_EQ(station_file_name(7), "station07.rec");
    EXPECT_EQ(station_file_name(13), "station13.rec");
    EXPECT_EQ(day_directory("/x", kDay), fs::path("/x/data/2017-01-23"));
    EXPECT_EQ(daily_data_bytes(13, 4320), 13u * 4320u * 72u);
}

TEST(DailyStore, RoundTrip) {
    TempDir dir;
    std::vector<record::MeasurementRecord> written;
    {
        DailyStore d(dir.path(), kDay, kStations);
        for (std::uint32_t seq = 1; seq <= 50; ++seq) {
            for (const auto s : kStations) {
                written.push_back(rec(s, seq, day_start(kDay) + 20 * seq, seq % 7 == 0));
                d.append(written.back());
            }
        }
        const auto m = d.close();
        EXPECT_TRUE(m.closed);
        EXPECT_EQ(m.rounds, 50u);
        EXPECT_EQ(m.delivered + m.missing, 150u);
        EXPECT_EQ(m.missing, 21u);
    }
    for (const auto s : kStations) {
        const auto back = read_records(dir.path(), kDay, s);
        ASSERT_EQ(back.size(), 50u);
        std::size_t k = 0;
        for (const auto& w : written) {
            if (w.station == s) EXPECT_EQ(back[k++], w);
        }
        EXPECT_EQ(fs::file_size(day_directory(dir.path(), kDay) / station_file_name(s)), 50u * 72u);
    }
    EXPECT_TRUE(verify_day(dir.path(), kDay).ok);
}

TEST(DailyStore, RejectsForeignRecords) {
    TempDir dir;
    DailyStore d(dir.path(), kDay, kStations);
    EXPECT_THROW(d.append(rec(1, 1, day_start(kDay + 1))), StorageError);
    EXPECT_THROW(d.append(rec(1, 1, day_start(kDay) - 1)), StorageError);
    EXPECT_THROW(d.append(rec(9, 1, day_start(kDay))), StorageError);
    d.close();
    EXPECT_THROW(d.append(rec(1, 1, day_start(kDay))), StorageError);
    EXPECT_THROW(DailyStore(dir.path(), kDay, kStations), StorageError);
}

TEST(DailyStore, EmptyDay) {
    TempDir dir;
    DailyStore(dir.path(), kDay, kStations).close();
    const auto m = read_manifest(dir.path(), kDay);
    EXPECT_TRUE(m.closed);
    EXPECT_EQ(m.rounds, 0u);
    EXPECT_EQ(m.delivered, 0u);
    EXPECT_EQ(m.missing, 0u);
    ASSERT_EQ(m.files.size(), 4u);
    for (const auto& f : m.files) {
        EXPECT_EQ(f.records, 0u);
        if (f.station) EXPECT_EQ(f.bytes, 0u);
    }
    EXPECT_TRUE(verify_day(dir.path(), kDay).ok);
    EXPECT_NO_THROW(export_backup_manifest(dir.path(), kDay));
}

TEST(Manifest, JsonRoundTrip) {
    Manifest m;
    m.date = "2017-01-24";
    m.closed = true;
    m.rounds = 4320;
    m.delivered = 4000;
    m.missing = 320;
    m.files.push_back({"station01.rec", 1, 4320, 4320 * 72, std::string(64, 'a')});
    m.files.push_back({"linklog.csv", std::nullopt, 9, 777, std::string(64, 'b')});
    const auto back = Manifest::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json());
    EXPECT_FALSE(back.files[1].station);
    EXPECT_THROW(Manifest::from_json("{not json"), FormatError);
    EXPECT_THROW(Manifest::from_json("{\"date\": 3}"), FormatError);
}

TEST(Verify, DetectsTampering) {
    TempDir dir;
    {
        DailyStore d(dir.path(), kDay, kStations);
        for (std::uint32_t seq = 1; seq <= 10; ++seq) {
            for (const auto s : kStations) d.append(rec(s, seq, day_start(kDay) + 20 * seq));
        }
        d.close();
    }
    const auto file = day_directory(dir.path(), kDay) / station_file_name(2);
    {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(20);
        f.put('\x7f');
    }
    const auto res = verify_day(dir.path(), kDay);
    EXPECT_FALSE(res.ok);
    ASSERT_FALSE(res.problems.empty());
    EXPECT_NE(res.problems[0].find("checksum"), std::string::npos);

    fs::resize_file(file, 72 * 10 - 5);
    EXPECT_FALSE(verify_day(dir.path(), kDay).ok);
    EXPECT_THROW(read_records(dir.path(), kDay, 2), FormatError);
}

TEST(Backup, OpenDayNotReady) {
    TempDir dir;
    DailyStore d(dir.path(), kDay, kStations);
    d.append(rec(1, 1, day_start(kDay) + 20));
    d.flush();
    EXPECT_THROW(export_backup_manifest(dir.path(), kDay), NotReadyError);
    EXPECT_TRUE(list_closed_days(dir.path()).empty());
    EXPECT_EQ(list_days(dir.path()), (std::vector<std::int64_t>{kDay}));
    d.close();
    const auto doc = export_backup_manifest(dir.path(), kDay);
    const auto m = Manifest::from_json(doc);
    EXPECT_EQ(m.files.size(), kStations.size() + 1);
    EXPECT_EQ(list_closed_days(dir.path()), (std::vector<std::int64_t>{kDay}));
}

TEST(Writer, RolloverMovesForwardOnly) {
    TempDir dir;
    StoreWriter w(dir.path(), kStations);
    w.rollover(kDay);
    w.rollover(kDay + 1);
    EXPECT_THROW(w.rollover(kDay), StorageError);
    w.close();
    EXPECT_EQ(w.closed_manifests().size(), 2u);
    EXPECT_FALSE(w.current_day());
    EXPECT_THROW(w.rollover(kDay + 1), StorageError);
}

TEST(WriterProperty, RecordsNeverLandInTheWrongDay) {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
        TempDir dir;
        StoreWriter w(dir.path(), kStations);
        std::map<std::int64_t, std::size_t> expected;
        UtcSeconds t = day_start(kDay + 1) - 120 - static_cast<UtcSeconds>(rng.next() % 600);
        std::uint32_t seq = 0;
        // sequences of records with jittered times straddling two midnights
        while (t < day_start(kDay + 2) + 300) {
            std::vector<record::MeasurementRecord> batch;
            for (const auto s : kStations) {
                batch.push_back(rec(s, ++seq, t, rng.uniform() < 0.2));
                expected[day_index(t)] += 1;
            }
            w.persist(batch);
            t += 1 + static_cast<UtcSeconds>(rng.next() % 40);
            if (rng.uniform() < 0.02) t += 86400 / 2;
        }
        w.close();
        std::size_t total = 0;
        for (const auto day : list_days(dir.path())) {
            ASSERT_TRUE(verify_day(dir.path(), day).ok);
            std::size_t n = 0;
            for (const auto s : kStations) {
                for (const auto& r : read_records(dir.path(), day, s)) {
                    ASSERT_EQ(day_index(static_cast<UtcSeconds>(r.timestamp)), day);
                    ++n;
                }
            }
            ASSERT_EQ(n, expected[day]);
            total += n;
        }
        ASSERT_EQ(total, seq);
    }
}

TEST(Writer, StaleRecordAfterRolloverRejected) {
    TempDir dir;
    StoreWriter w(dir.path(), kStations);
    const std::vector<record::MeasurementRecord> late{rec(1, 2, day_start(kDay + 1) + 5)};
    const std::vector<record::MeasurementRecord> early{rec(1, 1, day_start(kDay + 1) - 5)};
    w.persist(late);
    EXPECT_THROW(w.persist(early), StorageError);
}

TEST(Writer, LinklogFollowsDays) {
    TempDir dir;
    StoreWriter w(dir.path(), kStations);
    collector::LinkLogEntry e;
    e.time_ms = 1000LL * day_start(kDay) + 1000;
    const std::vector<collector::LinkLogEntry> a{e};
    w.persist_linklog(a);
    e.time_ms = 1000LL * day_start(kDay + 1) + 1000;
    const std::vector<collector::LinkLogEntry> b{e};
    w.persist_linklog(b);
    w.close();
    for (const auto day : {kDay, kDay + 1}) {
        const auto m = read_manifest(dir.path(), day);
        EXPECT_EQ(m.files.back().name, "linklog.csv");
        EXPECT_EQ(m.files.back().records, 1u);
        const auto text = testsupport::slurp(day_directory(dir.path(), day) / "linklog.csv");
        EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    }
}
