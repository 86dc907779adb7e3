#pragma once

// Thermal quantities derived from globe/air/wind/humidity readings and the
// erythemal UV index.

#include <span>
#include <vector>

namespace greenmesh::climate {

/// The four basic climatic quantities at one point.
struct BasicParameters {
    double air_temp = 0.0;           // degC
    double mean_radiant_temp = 0.0;  // degC
    double air_velocity = 0.0;       // m/s, >= 0
    double vapour_pressure = 0.0;    // kPa, >= 0
};

struct GlobeSpec {
    double diameter = 0.15;  // m, matte black globe
};

struct RawReadings {
    double air_temp = 0.0;           // degC
    double globe_temp = 0.0;         // degC
    double air_velocity = 0.0;       // m/s
    double relative_humidity = 0.0;  // percent
};

enum class ConvectionRegime { natural, forced };

const char* to_string(ConvectionRegime regime);

struct RadiantResult {
    double mean_radiant_temp = 0.0;  // degC
    ConvectionRegime regime = ConvectionRegime::natural;
};

/// Globe heat-transfer coefficient under natural convection, W/(m2 K).
double hcg_natural(double globe_temp, double air_temp, const GlobeSpec& globe = {});

/// Globe heat-transfer coefficient under forced convection, W/(m2 K).
double hcg_forced(double air_velocity, const GlobeSpec& globe = {});

/// Natural-convection formula for a standard 15 cm globe. The radiant
/// correction keeps the sign of (t_g - t_a).
double mean_radiant_natural(double globe_temp, double air_temp);

/// Forced-convection formula at the given air velocity.
double mean_radiant_forced(double globe_temp, double air_temp, double air_velocity);

/// Mean radiant temperature with regime chosen by the larger convection
/// coefficient; ties go to natural convection.
RadiantResult mean_radiant_temp(const RawReadings& readings, const GlobeSpec& globe = {});

/// Partial vapour pressure in kPa from the Magnus saturation curve.
double partial_vapour_pressure(double air_temp, double relative_humidity);

/// Sampled spectral irradiance. Wavelengths in nm strictly ascending,
/// irradiance in W m-2 nm-1.
struct UvSpectrum {
    std::vector<double> wavelength_nm;
    std::vector<double> irradiance;
};

inline constexpr double kErythemaConstant = 40.0;  // m2/W
inline constexpr double kUvLowerNm = 250.0;
inline constexpr double kUvUpperNm = 400.0;

/// Erythema action spectrum tabulated at 1 nm over [250, 400], linearly
/// interpolated between table points. Zero outside the table.
double erythema_weight(double wavelength_nm);

/// The 1 nm table itself (151 entries, index 0 is 250 nm).
std::span<const double> erythema_table();

/// Erythemally weighted UV index: trapezoidal integral of E * S_er over
/// [250, 400] nm on the supplied grid, times the erythema constant.
double uvi_from_spectrum(const UvSpectrum& spectrum);

enum class UvRisk { no_risk, risk };

const char* to_string(UvRisk risk);

/// Risk iff UVI strictly exceeds 2.
UvRisk classify_uvi(double uvi);

}  // namespace greenmesh::climate
