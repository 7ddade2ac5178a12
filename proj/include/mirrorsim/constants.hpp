#pragma once

// Physical constants (CODATA 2018 exact / recommended values) and the
// reference temperature used by all temperature laws.

namespace mirrorsim::constants {

inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kPlanck = 6.62607015e-34;          // J*s
inline constexpr double kElectronMass = 9.1093837015e-31;  // kg
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kReferenceTemp = 300.15;  // K (27 C)
inline constexpr double kZeroCelsius = 273.15;    // K

inline constexpr double celsius_to_kelvin(double c) { return c + kZeroCelsius; }
inline constexpr double kelvin_to_celsius(double k) { return k - kZeroCelsius; }

}  // namespace mirrorsim::constants
