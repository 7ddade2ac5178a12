#pragma once

// Modified nodal analysis, Newton-Raphson DC operating point, and fixed-step
// transient simulation with backward-Euler memristor state integration.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorsim/constants.hpp"
#include "mirrorsim/devices.hpp"
#include "mirrorsim/linalg.hpp"
#include "mirrorsim/netlist.hpp"

namespace mirrorsim::engine {

using netlist::Circuit;

struct SimOptions {
  double abstol = 1e-9;   // A
  double reltol = 1e-6;
  double vntol = 1e-6;    // V
  int max_newton_iters = 100;
  double gmin = 1e-12;    // S
  double dt = 0.0;        // s; 0 selects t_stop / 10000
  double t_stop = 0.0;    // s
  double temp = constants::kReferenceTemp;  // K
  int source_steps = 10;
  double max_voltage_step = 0.5;  // V per Newton iteration on MOSFET nodes
  int max_state_iters = 50;       // memristor/circuit fixed-point iterations per step

  void validate_tolerances() const;
  /// Also checks dt/t_stop; returns the effective step.
  double validate_transient() const;
};

/// Unknown vector layout: node voltages for nodes 1..N-1, then one branch
/// current per voltage source (into the + terminal).
std::size_t unknown_count(const Circuit& circuit);

struct StampContext {
  double temp = constants::kReferenceTemp;
  double time = 0.0;
  double source_scale = 1.0;
  double gmin = 1e-12;
};

struct MnaSystem {
  DenseMatrix g;
  std::vector<double> rhs;
};

/// Linearized MNA system at `guess`. Memristors stamp 1/M at the given states.
MnaSystem assemble_system(const Circuit& circuit, std::span<const double> guess,
                          std::span<const devices::MemristorState> states, const StampContext& ctx);

struct OperatingPoint {
  std::vector<double> node_voltages;       // per node, [0] == 0
  std::vector<double> source_currents;     // per voltage source, into the + terminal
  std::vector<double> resistor_currents;   // a -> b
  std::vector<double> memristor_currents;  // n+ -> n-
  std::vector<double> mosfet_currents;     // into the drain
  std::vector<double> solution;            // raw MNA unknowns
  int iterations = 0;
  double max_kcl_residual = 0.0;           // A, largest node current imbalance

  /// Voltage of a named node; LookupError when unknown.
  double voltage(const Circuit& circuit, std::string_view node) const;
  /// Current of a named device (sign conventions above); LookupError when unknown.
  double current(const Circuit& circuit, std::string_view device) const;
};

/// DC operating point at time `time` with memristor states held at `states`.
OperatingPoint solve_operating_point(const Circuit& circuit, const SimOptions& opts,
                                     std::span<const devices::MemristorState> states, double time = 0.0,
                                     std::span<const double> initial_guess = {});

/// DC operating point with memristors frozen at their initial states.
OperatingPoint solve_dc(const Circuit& circuit, const SimOptions& opts);

/// Sum of device currents leaving each non-ground node at `op` (A).
std::vector<double> kcl_residuals(const Circuit& circuit, const OperatingPoint& op,
                                  std::span<const devices::MemristorState> states, const SimOptions& opts,
                                  double time = 0.0);

struct Waveform {
  std::string name;
  std::string unit;
  std::vector<double> t;
  std::vector<double> values;
};

struct TransientResult {
  std::vector<Waveform> waveforms;
  std::vector<devices::MemristorState> final_states;
  OperatingPoint final_op;
};

/// Fixed-step transient. Probes: `v(node)`, `i(device)`, `r(memristor)`
/// (memristance) and `w(memristor)` (boundary position).
TransientResult simulate_transient(const Circuit& circuit, const SimOptions& opts,
                                   std::span<const std::string> probes);

std::vector<Waveform> run_transient(const Circuit& circuit, const SimOptions& opts,
                                    std::span<const std::string> probes);

/// Every node voltage and device current, in circuit order.
std::vector<std::string> default_probes(const Circuit& circuit);

}  // namespace mirrorsim::engine
