#pragma once

// Daily on-disk store:
//
//   <root>/data/YYYY-MM-DD/stationNN.rec   fixed-width records, append-only
//   <root>/data/YYYY-MM-DD/linklog.csv     per-attempt link quality log
//   <root>/data/YYYY-MM-DD/manifest.json   counts, sizes and SHA-256 per file
//
// A day is open while records for it are being written and closed by the
// rollover to the next UTC date (or the end of a run).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greenmesh/collector.hpp"
#include "greenmesh/record.hpp"

struct evp_md_ctx_st;

namespace greenmesh::store {

namespace fs = std::filesystem;

/// Incremental SHA-256.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n);
    void update(const std::string& s) { update(s.data(), s.size()); }

    /// Lower-case hex digest of the bytes so far; the state is kept.
    std::string hex() const;

private:
    evp_md_ctx_st* ctx_;
};

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const fs::path& path);

struct FileEntry {
    std::string name;
    std::optional<std::uint8_t> station;  // empty for the link log
    std::uint64_t records = 0;            // records, or data lines for the link log
    std::uint64_t bytes = 0;
    std::string sha256;
};

struct Manifest {
    std::string date;
    std::size_t record_size = record::kRecordSize;
    bool closed = false;
    std::uint64_t rounds = 0;
    std::uint64_t delivered = 0;
    std::uint64_t missing = 0;
    std::vector<FileEntry> files;

    std::string to_json() const;
    static Manifest from_json(const std::string& text);
};

fs::path day_directory(const fs::path& root, std::int64_t day);
std::string station_file_name(std::uint8_t station);

/// Writer for one UTC day.
class DailyStore {
public:
    /// Creates the day directory with empty files and an open manifest.
    /// Throws StorageError when the directory already holds data.
    DailyStore(fs::path root, std::int64_t day, std::vector<std::uint8_t> stations);
    ~DailyStore();
    DailyStore(const DailyStore&) = delete;
    DailyStore& operator=(const DailyStore&) = delete;

    std::int64_t day() const { return day_; }
    bool closed() const { return closed_; }

    /// Throws StorageError for a record of another date, an unknown station,
    /// or a closed day.
    void append(const record::MeasurementRecord& r);
    void append_linklog(const collector::LinkLogEntry& e);

    /// Flushes files and rewrites the manifest with the current state.
    Manifest flush();

    /// Final manifest; further appends fail.
    Manifest close();

private:
    struct Stream;
    Manifest build_manifest();
    void write_manifest(const Manifest& m);

    fs::path dir_;
    std::int64_t day_;
    std::map<std::uint8_t, std::unique_ptr<Stream>> stations_;
    std::unique_ptr<Stream> linklog_;
    std::uint64_t delivered_ = 0;
    std::uint64_t missing_ = 0;
    bool closed_ = false;
};

/// Multi-day writer driving UTC-midnight rollover.
class StoreWriter {
public:
    StoreWriter(fs::path root, std::vector<std::uint8_t> stations);

    /// Opens `day`, closing the current one first. Days only move forward.
    void rollover(std::int64_t day);

    /// Appends records of the current day. A record dated after the current
    /// day triggers a rollover first; one dated before raises StorageError.
    void persist(std::span<const record::MeasurementRecord> records);
    void persist_linklog(std::span<const collector::LinkLogEntry> entries);

    /// Closes the open day, if any.
    void close();

    std::optional<std::int64_t> current_day() const;
    const std::vector<Manifest>& closed_manifests() const { return closed_; }

private:
    fs::path root_;
    std::vector<std::uint8_t> stations_;
    std::unique_ptr<DailyStore> current_;
    std::vector<Manifest> closed_;
};

/// Days (sorted) that have a manifest under `root`.
std::vector<std::int64_t> list_days(const fs::path& root);
std::vector<std::int64_t> list_closed_days(const fs::path& root);

Manifest read_manifest(const fs::path& root, std::int64_t day);

/// All records of one station file. Throws FormatError on a truncated file.
std::vector<record::MeasurementRecord> read_records(const fs::path& root, std::int64_t day,
                                                    std::uint8_t station);

struct VerifyResult {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Recomputes sizes, counts and checksums against the manifest.
VerifyResult verify_day(const fs::path& root, std::int64_t day);

/// Manifest document for an external backup transport. Throws
/// NotReadyError while the day is open.
std::string export_backup_manifest(const fs::path& root, std::int64_t day);

/// Deterministic data volume of one fully polled day.
constexpr std::uint64_t daily_data_bytes(std::uint64_t stations, std::uint64_t rounds_per_day) {
    return stations * rounds_per_day * record::kRecordSize;
}

}  // namespace greenmesh::store
