#include "greenmesh/store.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <system_error>

#include "greenmesh/errors.hpp"
#include "greenmesh/utc.hpp"

namespace greenmesh::store {
namespace {

using nlohmann::json;

fs::path manifest_path(const fs::path& dir) { return dir / "manifest.json"; }

void write_text_file(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write " + tmp.string());
        out << text;
        if (!out) throw StorageError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw StorageError("cannot replace " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
        throw StorageError("cannot initialise SHA-256");
    }
}

Sha256::~Sha256() { EVP_MD_CTX_free(ctx_); }

void Sha256::update(const void* data, std::size_t n) {
    if (n > 0 && EVP_DigestUpdate(ctx_, data, n) != 1) throw StorageError("SHA-256 update failed");
}

std::string Sha256::hex() const {
    EVP_MD_CTX* copy = EVP_MD_CTX_new();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    const bool ok = copy && EVP_MD_CTX_copy_ex(copy, ctx_) == 1 && EVP_DigestFinal_ex(copy, md, &len) == 1;
    EVP_MD_CTX_free(copy);
    if (!ok) throw StorageError("SHA-256 finalisation failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(digits[md[i] >> 4]);
        out.push_back(digits[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + path.string());
    Sha256 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

std::string Manifest::to_json() const {
    json files_json = json::array();
    for (const auto& f : files) {
        json e{{"name", f.name}, {"records", f.records}, {"bytes", f.bytes}, {"sha256", f.sha256}};
        e["station"] = f.station ? json(*f.station) : json(nullptr);
        files_json.push_back(std::move(e));
    }
    const json doc{{"date", date},         {"record_size", record_size}, {"closed", closed},
                   {"rounds", rounds},     {"delivered", delivered},     {"missing", missing},
                   {"files", files_json}};
    return doc.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        Manifest m;
        m.date = doc.at("date").get<std::string>();
        m.record_size = doc.at("record_size").get<std::size_t>();
        m.closed = doc.at("closed").get<bool>();
        m.rounds = doc.at("rounds").get<std::uint64_t>();
        m.delivered = doc.at("delivered").get<std::uint64_t>();
        m.missing = doc.at("missing").get<std::uint64_t>();
        for (const auto& e : doc.at("files")) {
            FileEntry f;
            f.name = e.at("name").get<std::string>();
            if (!e.at("station").is_null()) f.station = e.at("station").get<std::uint8_t>();
            f.records = e.at("records").get<std::uint64_t>();
            f.bytes = e.at("bytes").get<std::uint64_t>();
            f.sha256 = e.at("sha256").get<std::string>();
            m.files.push_back(std::move(f));
        }
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
}

fs::path day_directory(const fs::path& root, std::int64_t day) { return root / "data" / date_string(day); }

std::string station_file_name(std::uint8_t station) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "station%02u.rec", unsigned{station});
    return buf;
}

struct DailyStore::Stream {
    std::string name;
    std::ofstream out;
    Sha256 sha;
    std::uint64_t records = 0;
    std::uint64_t bytes = 0;

    Stream(const fs::path& path, std::string file_name)
        : name(std::move(file_name)), out(path, std::ios::binary | std::ios::trunc) {
        if (!out) throw StorageError("cannot create " + path.string());
    }

    void write(const void* data, std::size_t n) {
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out) throw StorageError("write failed for " + name);
        sha.update(data, n);
        bytes += n;
    }
};

DailyStore::DailyStore(fs::path root, std::int64_t day, std::vector<std::uint8_t> stations)
    : dir_(day_directory(root, day)), day_(day) {
    std::error_code ec;
    if (fs::exists(manifest_path(dir_), ec)) {
        throw StorageError("day directory " + dir_.string() + " already holds data");
    }
    fs::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create " + dir_.string() + ": " + ec.message());
    std::sort(stations.begin(), stations.end());
    for (const auto id : stations) {
        const auto name = station_file_name(id);
        stations_.emplace(id, std::make_unique<Stream>(dir_ / name, name));
    }
    linklog_ = std::make_unique<Stream>(dir_ / "linklog.csv", "linklog.csv");
    const auto header = collector::linklog_header();
    linklog_->write(header.data(), header.size());
    write_manifest(build_manifest());
}

DailyStore::~DailyStore() = default;

void DailyStore::append(const record::MeasurementRecord& r) {
    if (closed_) throw StorageError("day " + date_string(day_) + " is closed");
    if (day_index(static_cast<UtcSeconds>(r.timestamp)) != day_) {
        throw StorageError("record dated " + datetime_string(static_cast<UtcSeconds>(r.timestamp)) +
                           " does not belong to " + date_string(day_));
    }
    const auto it = stations_.find(r.station);
    if (it == stations_.end()) throw StorageError("record for unknown station " + std::to_string(r.station));
    const auto bytes = record::encode_record(r);
    it->second->write(bytes.data(), bytes.size());
    ++it->second->records;
    if (r.missing()) {
        ++missing_;
    } else {
        ++delivered_;
    }
}

void DailyStore::append_linklog(const collector::LinkLogEntry& e) {
    if (closed_) throw StorageError("day " + date_string(day_) + " is closed");
    const auto line = collector::linklog_line(e);
    linklog_->write(line.data(), line.size());
    ++linklog_->records;
}

Manifest DailyStore::build_manifest() {
    Manifest m;
    m.date = date_string(day_);
    m.closed = closed_;
    m.delivered = delivered_;
    m.missing = missing_;
    for (auto& [id, s] : stations_) {
        s->out.flush();
        m.rounds = std::max(m.rounds, s->records);
        m.files.push_back(FileEntry{s->name, id, s->records, s->bytes, s->sha.hex()});
    }
    linklog_->out.flush();
    m.files.push_back(FileEntry{linklog_->name, std::nullopt, linklog_->records, linklog_->bytes,
                                linklog_->sha.hex()});
    return m;
}

void DailyStore::write_manifest(const Manifest& m) { write_text_file(manifest_path(dir_), m.to_json()); }

Manifest DailyStore::flush() {
    auto m = build_manifest();
    write_manifest(m);
    return m;
}

Manifest DailyStore::close() {
    if (closed_) return build_manifest();
    closed_ = true;
    auto m = build_manifest();
    for (auto& [id, s] : stations_) s->out.close();
    linklog_->out.close();
    write_manifest(m);
    return m;
}

StoreWriter::StoreWriter(fs::path root, std::vector<std::uint8_t> stations)
    : root_(std::move(root)), stations_(std::move(stations)) {}

void StoreWriter::rollover(std::int64_t day) {
    if (current_) {
        if (day < current_->day()) throw StorageError("rollover must move forward in time");
        if (day == current_->day()) return;
        closed_.push_back(current_->close());
        current_.reset();
    } else if (!closed_.empty() && day <= parse_date(closed_.back().date)) {
        throw StorageError("day " + date_string(day) + " is already closed");
    }
    current_ = std::make_unique<DailyStore>(root_, day, stations_);
}

void StoreWriter::persist(std::span<const record::MeasurementRecord> records) {
    for (const auto& r : records) {
        const auto day = day_index(static_cast<UtcSeconds>(r.timestamp));
        if (!current_ || day > current_->day()) rollover(day);
        current_->append(r);
    }
}

void StoreWriter::persist_linklog(std::span<const collector::LinkLogEntry> entries) {
    for (const auto& e : entries) {
        const auto day = day_index(collector::to_seconds(e.time_ms));
        if (!current_ || day > current_->day()) rollover(day);
        if (day < current_->day()) throw StorageError("link log entry for a closed day");
        current_->append_linklog(e);
    }
}

void StoreWriter::close() {
    if (!current_) return;
    closed_.push_back(current_->close());
    current_.reset();
}

std::optional<std::int64_t> StoreWriter::current_day() const {
    if (!current_) return std::nullopt;
    return current_->day();
}

std::vector<std::int64_t> list_days(const fs::path& root) {
    std::vector<std::int64_t> days;
    std::error_code ec;
    const fs::path data = root / "data";
    if (!fs::is_directory(data, ec)) return days;
    for (const auto& entry : fs::directory_iterator(data, ec)) {
        if (!entry.is_directory()) continue;
        if (!fs::exists(manifest_path(entry.path()))) continue;
        try {
            days.push_back(parse_date(entry.path().filename().string()));
        } catch (const ConfigError&) {
            continue;  // not a day directory
        }
    }
    std::sort(days.begin(), days.end());
    return days;
}

std::vector<std::int64_t> list_closed_days(const fs::path& root) {
    std::vector<std::int64_t> out;
    for (const auto day : list_days(root)) {
        if (read_manifest(root, day).closed) out.push_back(day);
    }
    return out;
}

Manifest read_manifest(const fs::path& root, std::int64_t day) {
    return Manifest::from_json(read_file(manifest_path(day_directory(root, day))));
}

std::vector<record::MeasurementRecord> read_records(const fs::path& root, std::int64_t day,
                                                    std::uint8_t station) {
    const auto text = read_file(day_directory(root, day) / station_file_name(station));
    if (text.size() % record::kRecordSize != 0) {
        throw FormatError(station_file_name(station) + " is truncated");
    }
    std::vector<record::MeasurementRecord> out;
    out.reserve(text.size() / record::kRecordSize);
    const auto* p = reinterpret_cast<const std::uint8_t*>(text.data());
    for (std::size_t off = 0; off < text.size(); off += record::kRecordSize) {
        out.push_back(record::decode_record({p + off, record::kRecordSize}));
    }
    return out;
}

VerifyResult verify_day(const fs::path& root, std::int64_t day) {
    VerifyResult res;
    const auto dir = day_directory(root, day);
    const auto m = read_manifest(root, day);
    auto fail = [&](std::string msg) {
        res.ok = false;
        res.problems.push_back(std::move(msg));
    };
    if (m.record_size != record::kRecordSize) fail("unexpected record size in manifest");
    std::uint64_t delivered = 0;
    std::uint64_t missing = 0;
    for (const auto& f : m.files) {
        const auto path = dir / f.name;
        std::error_code ec;
        const auto size = fs::file_size(path, ec);
        if (ec) {
            fail(f.name + ": missing file");
            continue;
        }
        if (size != f.bytes) fail(f.name + ": size " + std::to_string(size) + " != manifest " + std::to_string(f.bytes));
        if (sha256_file(path) != f.sha256) fail(f.name + ": checksum mismatch");
        if (!f.station) continue;
        if (f.bytes != f.records * record::kRecordSize) fail(f.name + ": byte count disagrees with record count");
        try {
            const auto records = read_records(root, day, *f.station);
            if (records.size() != f.records) fail(f.name + ": record count mismatch");
            for (const auto& r : records) {
                if (r.station != *f.station) fail(f.name + ": foreign station record");
                if (day_index(static_cast<UtcSeconds>(r.timestamp)) != day) fail(f.name + ": record of another day");
                (r.missing() ? missing : delivered) += 1;
            }
        } catch (const FormatError& e) {
            fail(f.name + ": " + e.what());
        }
    }
    if (delivered != m.delivered || missing != m.missing) fail("delivered/missing totals disagree with records");
    return res;
}

std::string export_backup_manifest(const fs::path& root, std::int64_t day) {
    const auto m = read_manifest(root, day);
    if (!m.closed) throw NotReadyError("day " + m.date + " is still open");
    return m.to_json();
}

}  // namespace greenmesh::store
