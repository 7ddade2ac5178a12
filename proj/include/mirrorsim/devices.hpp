#pragma once

// Device models: linear ion drift memristor, level-1 MOSFET with
// temperature laws, linear-TC resistor, DC/sine sources, and standalone
// subthreshold / gate leakage estimators.

#include <cstdint>

#include "mirrorsim/constants.hpp"

namespace mirrorsim::devices {

/// Dopant mobility that makes the built-in two-memristor mirror switch in
/// 1.4 s at a 2.5 V supply (output of `mirrorsim calibrate` with defaults).
inline constexpr double kCalibratedMobility = 9.538765834528231e-15;  // m^2/(V*s)

struct MemristorParams {
  double r_on = 100.0;           // Ohm
  double r_off = 38.0e3;         // Ohm
  double length = 10.0e-9;       // m
  double mobility = kCalibratedMobility;
  int polarity = +1;             // +1: positive current grows the low-resistance region
  int window_exponent = 0;       // p in f(x) = 1 - (2x - 1)^(2p); 0 disables the window

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

struct MemristorState {
  double w = 0.0;  // boundary position, m, in [0, length]
};

/// Two-region memristance: (w/L) Ron + (1 - w/L) Roff.
double memristance(const MemristorState& state, const MemristorParams& params);

/// Boundary velocity dw/dt = polarity * mobility * (Ron/L) * i * f(w/L).
double memristor_dwdt(const MemristorState& state, double current, const MemristorParams& params);

/// Joglekar window f(x) = 1 - (2x - 1)^(2p); f == 1 for p == 0.
double joglekar_window(double x, int p);

/// Boundary position giving memristance `resistance`; throws DomainError
/// outside [Ron, Roff].
MemristorState state_for_resistance(double resistance, const MemristorParams& params);

/// Clamp w into [0, length].
MemristorState clamp_state(MemristorState state, const MemristorParams& params);

enum class Polarity : std::uint8_t { Nmos, Pmos };

struct MosfetParams {
  Polarity polarity = Polarity::Nmos;
  double vth0 = 0.45;          // |Vth| at the reference temperature, V
  double k_prime = 170.0e-6;   // mu0 * Cox, A/V^2
  double width = 0.27e-6;      // m
  double length = 0.18e-6;     // m
  double lambda = 0.05;        // 1/V
  double n_sub = 1.5;
  double t_ox = 4.0e-9;        // m
  double m_ox = 0.3 * constants::kElectronMass;  // kg
  double phi_ox = 3.1;         // V
  double vth_tc = -1.0e-3;     // V/K, applied to |Vth|
  double mobility_exp = -1.5;

  void validate() const;

  static MosfetParams nmos_default() { return {}; }
  /// PMOS: same geometry and threshold magnitude, hole mobility ~ 1/3 of electrons.
  static MosfetParams pmos_default() {
    MosfetParams p;
    p.polarity = Polarity::Pmos;
    p.k_prime = 60.0e-6;
    return p;
  }
};

/// |Vth| at `temp`.
double threshold_voltage(const MosfetParams& params, double temp);

/// mu0*Cox at `temp`, scaled by (T/T0)^mobility_exp.
double transconductance_parameter(const MosfetParams& params, double temp);

/// Drain current (positive into the drain) and its partial derivatives with
/// respect to vgs and vds.
struct MosfetOperatingPoint {
  double id = 0.0;
  double gm = 0.0;   // d id / d vgs
  double gds = 0.0;  // d id / d vds
};

/// Square-law drain current with channel-length modulation. Source/drain
/// reversal (vds < 0 for NMOS) and PMOS are handled by terminal reflection.
MosfetOperatingPoint mosfet_evaluate(double vgs, double vds, const MosfetParams& params, double temp);

inline double mosfet_current(double vgs, double vds, const MosfetParams& params, double temp) {
  return mosfet_evaluate(vgs, vds, params, temp).id;
}

/// kT/q. Throws DomainError for temp <= 0.
double thermal_voltage(double temp);

/// Subthreshold current I0 exp((vgs - Vth)/(n VT)) (1 - exp(-vds/VT)) with
/// I0 = (W/L) mu0 Cox VT^2 e^1.8. For PMOS the magnitudes -vgs, -vds are used
/// and the returned value is a magnitude.
double subthreshold_leakage(double vgs, double vds, const MosfetParams& params, double temp);

struct GateLeakageCoefficients {
  double a = 0.0;  // A/V^2
  double b = 0.0;  // V/m
};

/// A = q^3 / (16 pi^2 h phi_ox), B = 4 pi sqrt(2 m_ox) phi_ox^(3/2) / (3 h q),
/// with the barrier height expressed as an energy (q * phi_ox).
GateLeakageCoefficients gate_leakage_coefficients(const MosfetParams& params);

/// Direct-tunneling gate current for 0 <= vox < phi_ox; DomainError otherwise.
double gate_leakage(double vox, const MosfetParams& params);

struct ResistorParams {
  double r_nominal = 38.0e3;   // Ohm at T0
  double temp_coeff = 1.0e-3;  // 1/K
  double footprint_w = 2.0e-6;   // m
  double footprint_l = 10.0e-6;  // m

  void validate() const;
};

/// r_nominal (1 + tc (T - T0)); DomainError if the result is not positive.
double resistor_value(const ResistorParams& params, double temp);

enum class SourceKind : std::uint8_t { Dc, Sine };

struct SourceSpec {
  SourceKind kind = SourceKind::Dc;
  double dc_value = 0.0;   // V; also the offset of a sine source
  double amplitude = 0.0;  // V
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // rad

  void validate() const;
  double value_at(double t) const;

  static SourceSpec dc(double v) { return {SourceKind::Dc, v, 0.0, 0.0, 0.0}; }
  static SourceSpec sine(double offset, double amplitude, double frequency, double phase = 0.0) {
    return {SourceKind::Sine, offset, amplitude, frequency, phase};
  }
};

// Layout footprints used for area reports.
inline constexpr double kMemristorFootprintW = 45.0e-9;
inline constexpr double kMemristorFootprintL = 90.0e-9;

inline double mosfet_area(const MosfetParams& p) { return p.width * p.length; }
inline double resistor_area(const ResistorParams& p) { return p.footprint_w * p.footprint_l; }
inline constexpr double memristor_area() { return kMemristorFootprintW * kMemristorFootprintL; }

}  // namespace mirrorsim::devices
