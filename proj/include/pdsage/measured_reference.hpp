#pragma once

// Values reported for the 16-location outdoor campaign. They need the raw
// measurement data to reproduce, so nothing in the library or the tests is
// compared against them; they serve as magnitude references and format
// fixtures only.

#include <array>
#include <cstddef>
#include <optional>

namespace pdsage::reference {

inline constexpr std::size_t kLocations = 16;

// LoS/OLoS flag per location (true = OLoS).
inline constexpr std::array<bool, kLocations> kOlos{false, false, false, false, false, true,
                                                     true,  false, false, false, true,  true,
                                                     true,  false, false, false};

inline constexpr std::array<double, kLocations> kPathLossDb{
    91.986,  104.666, 110.813, 117.220, 120.120, 120.283, 120.184, 112.835,
    107.356, 119.902, 120.034, 129.474, 121.438, 115.735, 110.271, 110.066};

inline constexpr std::array<double, kLocations> kShadowFadingCiDb{
    -8.007, -2.982, -0.719, 1.961, 2.696, -2.120, -2.941, 0.116,
    -2.293, 2.686,  -2.172, 6.446, 0.760, 1.405,  -0.184, 0.975};

inline constexpr std::array<double, kLocations> kShadowFadingFiDb{
    -0.660, -0.215, -0.277, 0.174, -0.388, -2.145, -3.156, -0.152,
    -0.724, -0.273, -2.145, 6.257, 1.189,  0.173,  -0.535, 2.878};

inline constexpr double kCiExponentLos = 2.443;
inline constexpr double kCiExponentOlos = 2.778;
inline constexpr double kFiSlopeLos = 3.905;
inline constexpr double kFiInterceptLos = 65.810;
inline constexpr double kFiSlopeOlos = 3.508;
inline constexpr double kFiInterceptOlos = 72.916;
inline constexpr double kSfSigmaCiLos = 3.034;
inline constexpr double kSfSigmaCiOlos = 3.464;
inline constexpr double kSfSigmaFiLos = 0.952;
inline constexpr double kSfSigmaFiOlos = 3.456;

inline constexpr std::array<double, kLocations> kDelaySpreadNs{
    0.606, 0.755, 0.362, 1.023, 0.244, 0.227, 0.665, 0.656,
    0.245, 0.446, 0.549, 0.610, 0.330, 0.405, 0.425, 0.456};
inline constexpr double kDsLogMean = -0.348;  // log10(DS / 1 ns)
inline constexpr double kDsLogStd = 0.197;

// Two locations have no reported AoD spread.
inline constexpr std::array<std::optional<double>, kLocations> kAngularSpreadDeg{
    3.768, 2.351, 2.893, 1.972, 2.418, 4.353, 3.187, 1.732,
    2.850, 4.288, 5.651, std::nullopt, 5.658, 4.309, 5.505, std::nullopt};
inline constexpr double kAsLogMean = 0.512;  // log10(AS / 1 deg)
inline constexpr double kAsLogStd = 0.218;
inline constexpr double kAsNakagamiM = 1.362;
inline constexpr double kAsNakagamiOmega = 15.913;

inline constexpr std::array<double, kLocations> kKfMeanDb{
    14.528, 7.730, 15.876, 13.035, 18.655, 19.728, 9.275,  8.933,
    21.117, 14.097, 12.019, 11.393, 19.658, 16.037, 15.305, 14.279};
inline constexpr std::array<double, kLocations> kKfStdDb{
    5.290, 1.608, 2.889, 0.934, 0.986, 1.052, 0.917, 0.692,
    3.204, 1.111, 1.372, 1.529, 3.789, 1.459, 1.859, 1.102};
inline constexpr double kKfLogMean = 1.448;  // log10(kappa)
inline constexpr double kKfLogStd = 0.449;
inline constexpr std::size_t kKfSamplesPerLocation = 512;

inline constexpr double kMeasuredNmseAware = 0.0164;
inline constexpr double kMeasuredNmseUnaware = 0.0390;
inline constexpr double kMeasuredNmseReductionPercent = 61.571;
inline constexpr double kMeanPhaseFitRSquared = 0.864;
inline constexpr double kPathPowerStdDb = 4.09;  // location 1, path 2

}  // namespace pdsage::reference
