#include "greenmesh/climate.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "greenmesh/errors.hpp"

namespace greenmesh::climate {
namespace {

// Offset applied exactly as in the ISO 7726 globe formulas (not 273.15).
constexpr double kKelvinOffset = 273.0;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

double fourth_root_or_throw(double bracket, double globe_temp, double air_temp) {
    if (!(bracket >= 0.0)) {
        std::ostringstream os;
        os << "mean radiant temperature undefined: negative radicand for t_g=" << globe_temp
           << " degC, t_a=" << air_temp << " degC";
        throw DomainError(os.str());
    }
    return std::pow(bracket, 0.25) - kKelvinOffset;
}

std::array<double, 151> build_erythema_table() {
    std::array<double, 151> table{};
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double nm = kUvLowerNm + static_cast<double>(i);
        if (nm <= 298.0) {
            table[i] = 1.0;
        } else if (nm <= 328.0) {
            table[i] = std::pow(10.0, 0.094 * (298.0 - nm));
        } else {
            table[i] = std::pow(10.0, 0.015 * (140.0 - nm));
        }
    }
    return table;
}

const std::array<double, 151>& table_ref() {
    static const auto table = build_erythema_table();
    return table;
}

}  // namespace

const char* to_string(ConvectionRegime regime) {
    return regime == ConvectionRegime::natural ? "natural" : "forced";
}

const char* to_string(UvRisk risk) { return risk == UvRisk::risk ? "risk" : "no-risk"; }

double hcg_natural(double globe_temp, double air_temp, const GlobeSpec& globe) {
    require_finite(globe_temp, "globe temperature");
    require_finite(air_temp, "air temperature");
    if (!(globe.diameter > 0.0)) throw DomainError("globe diameter must be positive");
    return 1.4 * std::pow(std::abs(globe_temp - air_temp) / globe.diameter, 0.25);
}

double hcg_forced(double air_velocity, const GlobeSpec& globe) {
    require_finite(air_velocity, "air velocity");
    if (air_velocity < 0.0) throw DomainError("air velocity must be non-negative");
    if (!(globe.diameter > 0.0)) throw DomainError("globe diameter must be positive");
    return 6.3 * std::pow(air_velocity, 0.6) / std::pow(globe.diameter, 0.4);
}

double mean_radiant_natural(double globe_temp, double air_temp) {
    require_finite(globe_temp, "globe temperature");
    require_finite(air_temp, "air temperature");
    const double diff = globe_temp - air_temp;
    const double tg_k = globe_temp + kKelvinOffset;
    const double bracket = tg_k * tg_k * tg_k * tg_k + 0.4e8 * std::pow(std::abs(diff), 0.25) * diff;
    if (diff == 0.0) return globe_temp;
    return fourth_root_or_throw(bracket, globe_temp, air_temp);
}

double mean_radiant_forced(double globe_temp, double air_temp, double air_velocity) {
    require_finite(globe_temp, "globe temperature");
    require_finite(air_temp, "air temperature");
    require_finite(air_velocity, "air velocity");
    if (air_velocity < 0.0) throw DomainError("air velocity must be non-negative");
    const double diff = globe_temp - air_temp;
    if (diff == 0.0) return globe_temp;
    const double tg_k = globe_temp + kKelvinOffset;
    const double bracket = tg_k * tg_k * tg_k * tg_k + 2.5e8 * std::pow(air_velocity, 0.6) * diff;
    return fourth_root_or_throw(bracket, globe_temp, air_temp);
}

RadiantResult mean_radiant_temp(const RawReadings& readings, const GlobeSpec& globe) {
    const double natural = hcg_natural(readings.globe_temp, readings.air_temp, globe);
    const double forced = hcg_forced(readings.air_velocity, globe);
    if (natural >= forced) {
        return {mean_radiant_natural(readings.globe_temp, readings.air_temp),
                ConvectionRegime::natural};
    }
    return {mean_radiant_forced(readings.globe_temp, readings.air_temp, readings.air_velocity),
            ConvectionRegime::forced};
}

double partial_vapour_pressure(double air_temp, double relative_humidity) {
    require_finite(air_temp, "air temperature");
    require_finite(relative_humidity, "relative humidity");
    if (relative_humidity < 0.0 || relative_humidity > 100.0) {
        throw DomainError("relative humidity must be within [0, 100] percent");
    }
    if (air_temp <= -243.04) throw DomainError("air temperature below Magnus formula pole");
    const double saturation = 0.61094 * std::exp(17.625 * air_temp / (air_temp + 243.04));
    return relative_humidity / 100.0 * saturation;
}

std::span<const double> erythema_table() { return table_ref(); }

double erythema_weight(double wavelength_nm) {
    if (!(wavelength_nm >= kUvLowerNm) || wavelength_nm > kUvUpperNm) return 0.0;
    const auto& table = table_ref();
    const double offset = wavelength_nm - kUvLowerNm;
    const auto i = static_cast<std::size_t>(offset);
    if (i + 1 >= table.size()) return table.back();
    const double frac = offset - static_cast<double>(i);
    return table[i] + frac * (table[i + 1] - table[i]);
}

double uvi_from_spectrum(const UvSpectrum& spectrum) {
    const auto& nm = spectrum.wavelength_nm;
    const auto& e = spectrum.irradiance;
    if (nm.size() != e.size()) throw FormatError("spectrum grid and irradiance differ in length");
    if (nm.size() < 2) throw FormatError("spectrum needs at least two grid points");
    for (std::size_t i = 0; i < nm.size(); ++i) {
        if (!std::isfinite(nm[i]) || !std::isfinite(e[i])) {
            throw FormatError("spectrum contains non-finite values");
        }
        if (e[i] < 0.0) throw FormatError("spectral irradiance must be non-negative");
        if (i > 0 && !(nm[i] > nm[i - 1])) {
            throw FormatError("spectrum wavelength grid must be strictly ascending");
        }
    }
    if (nm.front() > kUvLowerNm || nm.back() < kUvUpperNm) {
        throw FormatError("spectrum grid must cover 250-400 nm");
    }

    auto integrand = [&](double lambda, double irr) { return irr * erythema_weight(lambda); };
    double sum = 0.0;
    for (std::size_t i = 1; i < nm.size(); ++i) {
        double a = nm[i - 1];
        double b = nm[i];
        if (b <= kUvLowerNm || a >= kUvUpperNm) continue;
        double ea = e[i - 1];
        double eb = e[i];
        // Clip the segment to the integration window, interpolating E.
        if (a < kUvLowerNm) {
            ea += (eb - ea) * (kUvLowerNm - a) / (b - a);
            a = kUvLowerNm;
        }
        if (b > kUvUpperNm) {
            eb = ea + (eb - ea) * (kUvUpperNm - a) / (b - a);
            b = kUvUpperNm;
        }
        sum += 0.5 * (b - a) * (integrand(a, ea) + integrand(b, eb));
    }
    return kErythemaConstant * sum;
}

UvRisk classify_uvi(double uvi) {
    require_finite(uvi, "UV index");
    if (uvi < 0.0) throw DomainError("UV index must be non-negative");
    return uvi > 2.0 ? UvRisk::risk : UvRisk::no_risk;
}

}  // namespace greenmesh::climate
