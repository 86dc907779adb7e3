#include "greenmesh/station.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "greenmesh/errors.hpp"
#include "greenmesh/record.hpp"

namespace greenmesh::station {

double SensorSpec::accuracy_at(double truth) const {
    return accuracy + relative_accuracy * std::abs(truth);
}

void SensorSpec::validate() const {
    if (!(range_min < range_max)) throw ConfigError("sensor range must satisfy min < max");
    if (!(accuracy >= 0.0 && relative_accuracy >= 0.0)) throw ConfigError("sensor accuracy must be >= 0");
    if (!(counts_per_unit > 0.0)) throw ConfigError("sensor quantisation must be positive");
    if (!(noise_sigma_fraction >= 0.0)) throw ConfigError("sensor noise fraction must be >= 0");
}

SensorSpec default_spec(SensorKind kind) {
    SensorSpec s;
    s.kind = kind;
    switch (kind) {
        case SensorKind::air_temp:
        case SensorKind::globe_temp:
            s.range_min = -15.0;
            s.range_max = 250.0;
            s.accuracy = 0.06;
            break;
        case SensorKind::air_velocity:
            s.range_min = 0.0;
            s.range_max = 20.0;
            s.accuracy = 0.05;
            s.relative_accuracy = 0.10;
            break;
        case SensorKind::relative_humidity:
            s.range_min = 0.0;
            s.range_max = 100.0;
            s.accuracy = 3.0;
            break;
        case SensorKind::uv:
            s.range_min = 0.0;
            s.range_max = 15.0;
            s.accuracy = 1.0;
            s.counts_per_unit = 100.0;
            break;
    }
    return s;
}

SensorReading read_sensor(const SensorSpec& spec, double truth, Rng& rng, double offset_fraction) {
    const double bound = spec.accuracy_at(truth);
    double v = truth + std::clamp(offset_fraction, -1.0, 1.0) * bound;
    if (spec.noise_enabled && spec.noise_sigma_fraction > 0.0) {
        v += spec.noise_sigma_fraction * bound * rng.gaussian();
    }
    SensorReading r;
    if (v < spec.range_min) {
        v = spec.range_min;
        r.clamped = true;
    } else if (v > spec.range_max) {
        v = spec.range_max;
        r.clamped = true;
    }
    r.value = std::round(v * spec.counts_per_unit) / spec.counts_per_unit;
    return r;
}

CalibrationCurve CalibrationCurve::uncalibrated_default() {
    return CalibrationCurve{{{0.0, 0.0}, {5.0, 20.0}}, false};
}

void CalibrationCurve::validate() const {
    if (points.size() < 2) throw ConfigError("calibration curve needs at least two points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first > points[i - 1].first)) {
            throw ConfigError("calibration curve abscissae must be strictly ascending");
        }
        if (points[i].second < points[i - 1].second) {
            throw ConfigError("calibration curve must be monotone");
        }
    }
}

CalibrationCurve CalibrationCurve::inverse() const {
    validate();
    CalibrationCurve inv;
    inv.calibrated = calibrated;
    for (const auto& [x, y] : points) inv.points.emplace_back(y, x);
    inv.validate();
    return inv;
}

CalibratedValue wind_calibration(double volts, const CalibrationCurve& curve) {
    curve.validate();
    const auto& pts = curve.points;
    if (volts <= pts.front().first) return {pts.front().second, volts < pts.front().first};
    if (volts >= pts.back().first) return {pts.back().second, volts > pts.back().first};
    const auto it = std::upper_bound(pts.begin(), pts.end(), volts,
                                     [](double v, const auto& p) { return v < p.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double f = (volts - lo.first) / (hi.first - lo.first);
    return {lo.second + f * (hi.second - lo.second), false};
}

SensorSuite SensorSuite::ideal() {
    SensorSuite s;
    for (auto* spec : {&s.air_temp, &s.globe_temp, &s.air_velocity, &s.relative_humidity, &s.uv}) {
        spec->noise_enabled = false;
    }
    s.systematic_offsets = false;
    return s;
}

Station::Station(field::StationSite site, SensorSuite sensors, std::uint64_t seed)
    : site_(site), sensors_(std::move(sensors)), seed_(derive_seed(seed, {0x5354ULL, site.id})) {
    for (const auto* spec : {&sensors_.air_temp, &sensors_.globe_temp, &sensors_.air_velocity,
                             &sensors_.relative_humidity, &sensors_.uv}) {
        spec->validate();
    }
    sensors_.wind_transfer.validate();
    // Fixed per-probe calibration offsets within half the accuracy bound.
    Rng rng(derive_seed(seed_, {0x4f4646ULL}));
    for (auto& o : offsets_) o = rng.uniform() - 0.5;
    if (!sensors_.systematic_offsets) offsets_.fill(0.0);
}

bool Station::on_trigger(const TriggerPacket& trigger, const field::ClimateField& field) {
    if (trigger.sequence <= last_sequence_) return false;

    Rng rng(derive_seed(seed_, {trigger.sequence}));
    ClimateSample s;
    s.station = site_.id;
    s.sequence = trigger.sequence;
    s.timestamp = trigger.timestamp;
    for (std::size_t h = 0; h < 3; ++h) {
        const auto truth =
            field.sample(site_.position.x, site_.position.y, sensors_.heights_m[h], trigger.timestamp);
        auto& out = s.heights[h];
        const auto ta = read_sensor(sensors_.air_temp, truth.air_temp, rng, offset(h * 4 + 0));
        const auto tg = read_sensor(sensors_.globe_temp, truth.globe_temp, rng, offset(h * 4 + 1));
        const auto va = read_sensor(sensors_.air_velocity, truth.air_velocity, rng, offset(h * 4 + 2));
        const auto rh =
            read_sensor(sensors_.relative_humidity, truth.relative_humidity, rng, offset(h * 4 + 3));
        out.air_temp = ta.value;
        out.globe_temp = tg.value;
        out.wind_volts =
            std::round(wind_calibration(va.value, sensors_.wind_transfer).value * 1000.0) / 1000.0;
        out.relative_humidity = rh.value;
        s.clamped = s.clamped || ta.clamped || tg.clamped || va.clamped || rh.clamped;
        if (h == 2) {
            const auto uv = read_sensor(sensors_.uv, truth.uvi, rng, offset(12));
            s.uvi = uv.value;
            s.clamped = s.clamped || uv.clamped;
        }
    }
    buffered_ = s;
    last_sequence_ = trigger.sequence;
    return true;
}

radio::Packet Station::on_poll(const radio::Packet& poll) const {
    if (poll.kind != radio::PacketKind::poll || poll.destination != site_.id) {
        throw RoutingError("station MS-" + std::to_string(site_.id) + " received a misaddressed poll");
    }
    radio::Packet reply;
    reply.source = site_.id;
    reply.destination = radio::kCollector;
    reply.hops = {site_.id};
    if (!buffered_) {
        reply.kind = radio::PacketKind::no_data;
        reply.sequence = poll.sequence;
        return reply;
    }
    reply.kind = radio::PacketKind::data;
    reply.sequence = buffered_->sequence;
    const auto bytes = record::encode_payload(*buffered_);
    reply.payload.assign(bytes.begin(), bytes.end());
    return reply;
}

}  // namespace greenmesh::station
