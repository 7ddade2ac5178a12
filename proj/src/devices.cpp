#include "mirrorsim/devices.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mirrorsim/constants.hpp"
#include "mirrorsim/error.hpp"

namespace mirrorsim::devices {

using constants::kReferenceTemp;

void MemristorParams::validate() const {
  if (!(r_on > 0.0)) throw DomainError("memristor: r_on must be positive");
  if (!(r_off > r_on)) throw DomainError("memristor: r_off must exceed r_on");
  if (!(length > 0.0)) throw DomainError("memristor: length must be positive");
  if (!(mobility > 0.0)) throw DomainError("memristor: mobility must be positive");
  if (polarity != 1 && polarity != -1) throw DomainError("memristor: polarity must be +1 or -1");
  if (window_exponent < 0) throw DomainError("memristor: window exponent must be nonnegative");
}

double memristance(const MemristorState& state, const MemristorParams& params) {
  const double x = state.w / params.length;
  return x * params.r_on + (1.0 - x) * params.r_off;
}

double joglekar_window(double x, int p) {
  if (p == 0) return 1.0;
  return 1.0 - std::pow(2.0 * x - 1.0, 2 * p);
}

double memristor_dwdt(const MemristorState& state, double current, const MemristorParams& params) {
  const double x = state.w / params.length;
  return params.polarity * params.mobility * (params.r_on / params.length) * current *
         joglekar_window(x, params.window_exponent);
}

MemristorState state_for_resistance(double resistance, const MemristorParams& params) {
  if (resistance < params.r_on || resistance > params.r_off) {
    throw DomainError("memristor: initial resistance " + std::to_string(resistance) +
                      " outside [r_on, r_off]");
  }
  const double x = (params.r_off - resistance) / (params.r_off - params.r_on);
  return {x * params.length};
}

MemristorState clamp_state(MemristorState state, const MemristorParams& params) {
  state.w = std::clamp(state.w, 0.0, params.length);
  return state;
}

void MosfetParams::validate() const {
  if (!(width > 0.0)) throw DomainError("mosfet: width must be positive");
  if (!(length > 0.0)) throw DomainError("mosfet: length must be positive");
  if (!(t_ox > 0.0)) throw DomainError("mosfet: t_ox must be positive");
  if (!(n_sub >= 1.0)) throw DomainError("mosfet: n_sub must be >= 1");
  if (!(k_prime > 0.0)) throw DomainError("mosfet: k_prime must be positive");
}

double threshold_voltage(const MosfetParams& params, double temp) {
  return params.vth0 + params.vth_tc * (temp - kReferenceTemp);
}

double transconductance_parameter(const MosfetParams& params, double temp) {
  return params.k_prime * std::pow(temp / kReferenceTemp, params.mobility_exp);
}

namespace {

// NMOS-normalized evaluation, vds >= 0.
MosfetOperatingPoint square_law(double vgs, double vds, const MosfetParams& p, double temp) {
  const double vov = vgs - threshold_voltage(p, temp);
  if (vov <= 0.0) return {};
  const double beta = transconductance_parameter(p, temp) * p.width / p.length;
  const double clm = 1.0 + p.lambda * vds;
  if (vds < vov) {
    const double core = vov * vds - 0.5 * vds * vds;
    return {beta * core * clm, beta * vds * clm, beta * (vov - vds) * clm + beta * core * p.lambda};
  }
  const double core = 0.5 * vov * vov;
  return {beta * core * clm, beta * vov * clm, beta * core * p.lambda};
}

// Handles source/drain reversal for a normalized (n-type) device.
MosfetOperatingPoint normalized(double vgs, double vds, const MosfetParams& p, double temp) {
  if (vds >= 0.0) return square_law(vgs, vds, p, temp);
  // Terminals swap: id(vgs, vds) = -I(vgs - vds, -vds).
  const auto r = square_law(vgs - vds, -vds, p, temp);
  return {-r.id, -r.gm, r.gm + r.gds};
}

}  // namespace

MosfetOperatingPoint mosfet_evaluate(double vgs, double vds, const MosfetParams& params, double temp) {
  if (params.polarity == Polarity::Nmos) return normalized(vgs, vds, params, temp);
  // id_p(vgs, vds) = -id_n(-vgs, -vds); the two sign flips cancel in the derivatives.
  const auto r = normalized(-vgs, -vds, params, temp);
  return {-r.id, r.gm, r.gds};
}

double thermal_voltage(double temp) {
  if (!(temp > 0.0)) throw DomainError("thermal voltage: temperature must be positive");
  return constants::kBoltzmann * temp / constants::kElementaryCharge;
}

double subthreshold_leakage(double vgs, double vds, const MosfetParams& params, double temp) {
  if (params.polarity == Polarity::Pmos) {
    vgs = -vgs;
    vds = -vds;
  }
  const double vt = thermal_voltage(temp);
  const double i0 = params.width / params.length * transconductance_parameter(params, temp) * vt * vt *
                    std::exp(1.8);
  return i0 * std::exp((vgs - threshold_voltage(params, temp)) / (params.n_sub * vt)) *
         (1.0 - std::exp(-vds / vt));
}

GateLeakageCoefficients gate_leakage_coefficients(const MosfetParams& params) {
  using namespace constants;
  const double q = kElementaryCharge;
  const double barrier = q * params.phi_ox;  // J
  GateLeakageCoefficients c;
  c.a = q * q * q / (16.0 * kPi * kPi * kPlanck * barrier);
  c.b = 4.0 * kPi * std::sqrt(2.0 * params.m_ox) * std::pow(barrier, 1.5) / (3.0 * kPlanck * q);
  return c;
}

double gate_leakage(double vox, const MosfetParams& params) {
  if (!(vox >= 0.0) || vox >= params.phi_ox) {
    throw DomainError("gate leakage: vox must lie in [0, phi_ox)");
  }
  if (vox == 0.0) return 0.0;
  const auto c = gate_leakage_coefficients(params);
  const double field = vox / params.t_ox;
  const double shape = 1.0 - std::pow(1.0 - vox / params.phi_ox, 1.5);
  return params.width * params.length * c.a * field * field * std::exp(-c.b * shape / field);
}

void ResistorParams::validate() const {
  if (!(r_nominal > 0.0)) throw DomainError("resistor: value must be positive");
}

double resistor_value(const ResistorParams& params, double temp) {
  if (!(temp > 0.0)) throw DomainError("resistor: temperature must be positive");
  const double r = params.r_nominal * (1.0 + params.temp_coeff * (temp - kReferenceTemp));
  if (!(r > 0.0)) throw DomainError("resistor: value is not positive at this temperature");
  return r;
}

void SourceSpec::validate() const {
  if (kind == SourceKind::Sine && !(frequency > 0.0)) {
    throw DomainError("sine source: frequency must be positive");
  }
}

double SourceSpec::value_at(double t) const {
  if (kind == SourceKind::Dc) return dc_value;
  return dc_value + amplitude * std::sin(2.0 * constants::kPi * frequency * t + phase);
}

}  // namespace mirrorsim::devices
