#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "greenmesh/climate.hpp"
#include "greenmesh/errors.hpp"

using namespace greenmesh;
using namespace greenmesh::climate;

namespace {

// Direct arithmetic, written out independently of the library.
double oracle_natural_hcg(double dt, double d) { return 1.4 * std::pow(std::abs(dt) / d, 0.25); }
double oracle_forced_hcg(double v, double d) { return 6.3 * std::pow(v, 0.6) / std::pow(d, 0.4); }

UvSpectrum grid_spectrum(double step, double (*e)(double)) {
    UvSpectrum s;
    const int n = static_cast<int>(std::lround(150.0 / step));
    for (int i = 0; i <= n; ++i) {
        const double l = 250.0 + step * i;
        s.wavelength_nm.push_back(l);
        s.irradiance.push_back(e(l));
    }
    return s;
}

}  // namespace

TEST(Hcg, NaturalMatchesArithmetic) {
    EXPECT_NEAR(hcg_natural(30.0, 20.0), oracle_natural_hcg(10.0, 0.15), 1e-12);
    EXPECT_NEAR(hcg_natural(30.0, 20.0), 4.0007, 1e-3);
    EXPECT_NEAR(hcg_natural(30.0, 20.0, {0.30}), 3.3646, 1e-3);
    EXPECT_NEAR(hcg_natural(30.0, 20.0, {0.30}) / hcg_natural(30.0, 20.0), std::pow(0.5, 0.25), 1e-12);
    EXPECT_EQ(hcg_natural(21.0, 21.0), 0.0);
    // symmetric in the sign of the difference
    EXPECT_DOUBLE_EQ(hcg_natural(10.0, 20.0), hcg_natural(30.0, 20.0));
}

TEST(Hcg, ForcedMatchesArithmetic) {
    EXPECT_NEAR(hcg_forced(0.3), 6.534, 1e-3);
    EXPECT_NEAR(hcg_forced(1.0), 13.456, 1e-3);
    EXPECT_NEAR(hcg_forced(0.7, {0.2}), oracle_forced_hcg(0.7, 0.2), 1e-12);
    EXPECT_EQ(hcg_forced(0.0), 0.0);
}

TEST(Hcg, RejectsBadInput) {
    EXPECT_THROW(hcg_forced(-0.1), DomainError);
    EXPECT_THROW(hcg_natural(std::nan(""), 20.0), DomainError);
    EXPECT_THROW(hcg_natural(20.0, std::numeric_limits<double>::infinity()), DomainError);
    EXPECT_THROW(hcg_natural(30.0, 20.0, {0.0}), DomainError);
    EXPECT_THROW(hcg_forced(0.3, {-0.15}), DomainError);
}

TEST(MeanRadiant, EqualTemperaturesGiveGlobeTemperature) {
    for (double v : {0.0, 0.05, 0.5, 3.0}) {
        const auto r = mean_radiant_temp({25.0, 25.0, v, 50.0});
        EXPECT_NEAR(r.mean_radiant_temp, 25.0, 1e-9) << "v_a=" << v;
    }
}

TEST(MeanRadiant, ForcedSpotValue) {
    const auto r = mean_radiant_temp({20.0, 30.0, 0.5, 50.0});
    EXPECT_EQ(r.regime, ConvectionRegime::forced);
    const double oracle = std::pow(std::pow(303.0, 4) + 2.5e8 * std::pow(0.5, 0.6) * 10.0, 0.25) - 273.0;
    EXPECT_NEAR(r.mean_radiant_temp, oracle, 1e-9);
    EXPECT_NEAR(r.mean_radiant_temp, 43.85, 0.01);
}

TEST(MeanRadiant, LowAirSpeedIsNatural) {
    const auto r = mean_radiant_temp({20.0, 30.0, 0.10, 50.0});
    EXPECT_EQ(r.regime, ConvectionRegime::natural);
    const double oracle = std::pow(std::pow(303.0, 4) + 0.4e8 * std::pow(10.0, 0.25) * 10.0, 0.25) - 273.0;
    EXPECT_NEAR(r.mean_radiant_temp, oracle, 1e-9);
}

TEST(MeanRadiant, NaturalKeepsSignOfDifference) {
    // globe colder than air: the correction pulls t_r below t_g
    EXPECT_LT(mean_radiant_natural(15.0, 20.0), 15.0);
    EXPECT_GT(mean_radiant_natural(25.0, 20.0), 25.0);
}

TEST(MeanRadiant, NegativeBracketIsDomainError) {
    EXPECT_THROW(mean_radiant_temp({100.0, -200.0, 5.0, 50.0}), DomainError);
    try {
        mean_radiant_temp({100.0, -200.0, 5.0, 50.0});
    } catch (const DomainError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("100"), std::string::npos);
        EXPECT_NE(msg.find("-200"), std::string::npos);
    }
}

TEST(MeanRadiant, RejectsInvalidReadings) {
    EXPECT_THROW(mean_radiant_temp({20.0, 25.0, -0.1, 50.0}), DomainError);
    EXPECT_THROW(mean_radiant_temp({std::nan(""), 25.0, 0.1, 50.0}), DomainError);
}

TEST(MeanRadiantProperty, IdentityOverGrid) {
    for (int i = 0; i <= 70; ++i) {
        const double t = -10.0 + i;
        for (int j = 0; j <= 50; ++j) {
            const double v = 0.1 * j;
            const auto r = mean_radiant_temp({t, t, v, 40.0});
            ASSERT_NEAR(r.mean_radiant_temp, t, 1e-9) << t << " " << v;
            ASSERT_NEAR(mean_radiant_natural(t, t), t, 1e-9);
            ASSERT_NEAR(mean_radiant_forced(t, t, v), t, 1e-9);
        }
    }
}

TEST(MeanRadiantProperty, ForcedMonotoneInVelocity) {
    for (double dt : {-8.0, -2.0, 2.0, 8.0}) {
        double prev = mean_radiant_forced(20.0 + dt, 20.0, 0.05);
        for (double v = 0.1; v <= 5.0; v += 0.05) {
            const double cur = mean_radiant_forced(20.0 + dt, 20.0, v);
            if (dt > 0) {
                ASSERT_GT(cur, prev) << dt << " " << v;
            } else {
                ASSERT_LT(cur, prev) << dt << " " << v;
            }
            prev = cur;
        }
    }
}

TEST(MeanRadiantProperty, RegimeFollowsLargerCoefficient) {
    for (double dt = -15.0; dt <= 15.0; dt += 0.75) {
        for (double v = 0.0; v <= 1.5; v += 0.01) {
            const RawReadings r{20.0, 20.0 + dt, v, 50.0};
            const double hn = hcg_natural(r.globe_temp, r.air_temp);
            const double hf = hcg_forced(v);
            const auto res = mean_radiant_temp(r);
            ASSERT_EQ(res.regime, hn >= hf ? ConvectionRegime::natural : ConvectionRegime::forced) << dt << " " << v;
        }
    }
}

TEST(MeanRadiantProperty, TieGoesToNatural) {
    // at t_g = t_a and v_a = 0 both coefficients are zero
    EXPECT_EQ(mean_radiant_temp({20.0, 20.0, 0.0, 50.0}).regime, ConvectionRegime::natural);
}

TEST(VapourPressure, MagnusValues) {
    EXPECT_NEAR(partial_vapour_pressure(20.0, 100.0), 2.333, 1e-3);
    EXPECT_NEAR(partial_vapour_pressure(20.0, 50.0), 1.167, 1e-3);
    EXPECT_NEAR(partial_vapour_pressure(20.0, 100.0), 0.61094 * std::exp(17.625 * 20.0 / 263.04), 1e-12);
    for (double t : {-30.0, 0.0, 45.0}) EXPECT_EQ(partial_vapour_pressure(t, 0.0), 0.0);
}

TEST(VapourPressure, Errors) {
    EXPECT_THROW(partial_vapour_pressure(-243.04, 50.0), DomainError);
    EXPECT_THROW(partial_vapour_pressure(-300.0, 50.0), DomainError);
    EXPECT_THROW(partial_vapour_pressure(20.0, 100.5), DomainError);
    EXPECT_THROW(partial_vapour_pressure(20.0, -0.5), DomainError);
}

TEST(VapourPressureProperty, MonotoneInBothArguments) {
    for (double t = -20.0; t < 50.0; t += 1.0) {
        for (double rh = 5.0; rh < 100.0; rh += 5.0) {
            ASSERT_LT(partial_vapour_pressure(t, rh), partial_vapour_pressure(t + 1.0, rh));
            ASSERT_LT(partial_vapour_pressure(t, rh), partial_vapour_pressure(t, rh + 5.0));
        }
    }
}

TEST(Erythema, PiecewiseTable) {
    const auto table = erythema_table();
    ASSERT_EQ(table.size(), 151u);
    EXPECT_EQ(erythema_weight(250.0), 1.0);
    EXPECT_EQ(erythema_weight(298.0), 1.0);
    EXPECT_NEAR(erythema_weight(310.0), std::pow(10.0, 0.094 * (298.0 - 310.0)), 1e-15);
    EXPECT_NEAR(erythema_weight(350.0), std::pow(10.0, 0.015 * (140.0 - 350.0)), 1e-15);
    EXPECT_NEAR(erythema_weight(310.5), 0.5 * (table[60] + table[61]), 1e-15);
    EXPECT_EQ(erythema_weight(249.0), 0.0);
    EXPECT_EQ(erythema_weight(401.0), 0.0);
}

TEST(Uvi, ZeroSpectrum) {
    EXPECT_EQ(uvi_from_spectrum(grid_spectrum(1.0, [](double) { return 0.0; })), 0.0);
}

TEST(Uvi, BandLimited) {
    // cells [297, 298) on a 0.01 nm grid
    const auto s = grid_spectrum(0.01, [](double l) {
        const long c = std::lround(l * 100.0);
        return c >= 29700 && c < 29800 ? 0.05 : 0.0;
    });
    EXPECT_NEAR(uvi_from_spectrum(s), 2.00, 0.01);
}

TEST(Uvi, FlatSpectrum) {
    const auto s = grid_spectrum(1.0, [](double) { return 0.001; });
    EXPECT_NEAR(uvi_from_spectrum(s), 2.106, 1e-3);
}

TEST(Uvi, Linear) {
    auto s = grid_spectrum(0.5, [](double l) { return 0.002 * std::exp(-(l - 320.0) * (l - 320.0) / 400.0); });
    const double one = uvi_from_spectrum(s);
    for (auto& e : s.irradiance) e *= 2.0;
    EXPECT_NEAR(uvi_from_spectrum(s), 2.0 * one, 1e-12 * one);
}

TEST(Uvi, FormatErrors) {
    UvSpectrum s = grid_spectrum(1.0, [](double) { return 0.001; });
    std::swap(s.wavelength_nm[10], s.wavelength_nm[11]);
    EXPECT_THROW(uvi_from_spectrum(s), FormatError);

    UvSpectrum narrow{{260.0, 300.0, 390.0}, {0.0, 0.0, 0.0}};
    EXPECT_THROW(uvi_from_spectrum(narrow), FormatError);

    UvSpectrum ragged{{250.0, 400.0}, {0.0}};
    EXPECT_THROW(uvi_from_spectrum(ragged), FormatError);

    UvSpectrum negative{{250.0, 400.0}, {0.0, -1.0}};
    EXPECT_THROW(uvi_from_spectrum(negative), FormatError);
}

TEST(UviRisk, StrictThreshold) {
    EXPECT_EQ(classify_uvi(0.0), UvRisk::no_risk);
    EXPECT_EQ(classify_uvi(2.0), UvRisk::no_risk);
    EXPECT_EQ(classify_uvi(2.1), UvRisk::risk);
    EXPECT_THROW(classify_uvi(-0.01), DomainError);
}
