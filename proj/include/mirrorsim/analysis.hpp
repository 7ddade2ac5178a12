#pragma once

// Mirror-level analyses: THD, switching time, settled operating points,
// mismatch/temperature/parameter sweeps, hysteresis traces, power and area
// reports, and mobility calibration.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mirrorsim/csv.hpp"
#include "mirrorsim/devices.hpp"
#include "mirrorsim/engine.hpp"
#include "mirrorsim/netlist.hpp"

namespace mirrorsim::analysis {

using engine::OperatingPoint;
using engine::SimOptions;
using engine::Waveform;
using netlist::Circuit;
using netlist::MirrorConfig;
using netlist::MirrorKind;

// ---------------------------------------------------------------------------
// Signal analysis

struct ThdResult {
  double fundamental = 0.0;
  std::vector<double> harmonics;  // magnitudes of orders 2..N
  double thd = 0.0;               // fraction
  double percent() const { return 100.0 * thd; }
};

/// sqrt(sum V_n^2) / V_1.
double thd_from_magnitudes(double fundamental, std::span<const double> harmonics);

/// Default settle discard: max(20% of the record, two periods of f0).
double default_thd_discard(const Waveform& w, double f0);

/// THD by single-bin DFT correlation at k*f0 over the largest whole number of
/// periods following the discarded interval (default: default_thd_discard).
/// Throws Error when the record is too short, the period is not a whole
/// number of samples, or a harmonic lies above Nyquist.
ThdResult compute_thd(const Waveform& w, double f0, int n_harmonics,
                      std::optional<double> discard = std::nullopt);

/// Earliest time after which every sample stays within `settle_band` of the
/// final sample. Throws NotSettled if that leaves less than the last 10% of
/// the record.
double switching_time(const Waveform& w, double settle_band = 0.01);

// ---------------------------------------------------------------------------
// Mirror setup with dotted-path overrides

/// A built-in mirror plus per-device overrides such as `T2.width` or
/// `source.vbias`. Aliases: T1 -> M1, T2 -> M2, TP -> MP, source.vdd,
/// source.vbias; `R2.value` sets a resistor; memristor loads accept `Y2.r_off`.
struct MirrorSetup {
  MirrorConfig config;
  std::vector<std::pair<std::string, double>> overrides;

  /// Applies one setting. Throws LookupError for unknown paths.
  void set(std::string_view path, double value);
  netlist::NetlistAst netlist() const;
  Circuit circuit() const;
};

/// Applies `DEVICE.param = value` (or `nmos.param`, `pmos.param`,
/// `memristor.param` for model cards) to a parsed netlist. Throws LookupError
/// when the device is not present.
void apply_override(netlist::NetlistAst& ast, std::string_view path, double value);

/// Paths accepted by MirrorSetup::set for `kind`, for help text.
std::vector<std::string> known_parameter_paths(MirrorKind kind);

struct SettleOptions {
  double chunk = 1.0;      // s per transient segment
  double max_time = 60.0;  // s
  double dt = 5e-4;        // s, used when SimOptions::dt is 0
};

struct SettledPoint {
  Circuit circuit;  // memristors start from the settled states
  OperatingPoint op;
  std::vector<devices::MemristorState> states;
  double elapsed = 0.0;  // simulated settling time, s
};

/// DC solve for memristor-free circuits; otherwise transient segments until no
/// memristor state moves by more than reltol * L over a segment.
SettledPoint settle(const Circuit& circuit, const SimOptions& opts, const SettleOptions& settle = {});

// ---------------------------------------------------------------------------
// Sweeps

struct MismatchRow {
  double load2 = 0.0;      // Ohm
  double rel_change = 0.0; // (load2 - load1) / load1
  double simulated = 0.0;  // (I_D2 - I_D1) / I_D1
  double predicted = 0.0;  // K (load1 / load2 - 1)
  std::string error;       // nonempty when the row failed
};

struct MismatchTable {
  MirrorKind kind = MirrorKind::TwoResistors;
  double load1 = 0.0;
  double vds1 = 0.0;  // V at the matched baseline
  double k = 0.0;     // (1 - V_DS1 / V_DD)^-1
  std::vector<MismatchRow> rows;
};

/// Two-load mirrors only. Memristor loads are varied through their final
/// memristance (r_off of Y2) and simulated to the settled state.
MismatchTable mismatch_sweep(const MirrorSetup& setup, std::span<const double> load2_values,
                             const SimOptions& opts, int jobs = 1);

struct TemperatureRow {
  double temp = 0.0;  // K
  double i_in = 0.0;
  double i_out = 0.0;
  std::string error;
};

std::vector<TemperatureRow> temperature_sweep(const MirrorSetup& setup, std::span<const double> temps,
                                              const SimOptions& opts, int jobs = 1);

struct SweepRow {
  double value = 0.0;
  double i_out = 0.0;
  double v_out = 0.0;
  std::string error;
};

std::vector<SweepRow> parameter_sweep(const MirrorSetup& setup, std::string_view path,
                                      std::span<const double> values, const SimOptions& opts, int jobs = 1);

// ---------------------------------------------------------------------------
// Hysteresis

struct HysteresisOptions {
  int steps_per_cycle = 2000;
  std::optional<double> initial_resistance;   // default: midpoint of [Ron, Roff]
  std::optional<double> substitute_resistor;  // replace the memristor by a fixed resistor
  SimOptions sim;
};

struct HysteresisTrace {
  std::vector<double> t, v, i;
  double loop_area = 0.0;       // V*A, sum of both lobes over the last cycle
  double peak_current = 0.0;    // A, over the last cycle
  double line_deviation = 0.0;  // max |i - fit(v)| / peak, last cycle
};

/// Sine-driven source/memristor loop.
HysteresisTrace hysteresis_trace(const devices::MemristorParams& params, const devices::SourceSpec& drive,
                                 int cycles, const HysteresisOptions& options = {});

/// Sum over the v >= 0 and v < 0 lobes of the absolute shoelace area.
double pinched_loop_area(std::span<const double> v, std::span<const double> i);

/// Max residual from the least-squares line i = a + b v, divided by max |i|.
double max_line_deviation(std::span<const double> v, std::span<const double> i);

// ---------------------------------------------------------------------------
// Power, area and distortion summary

struct ReportRow {
  MirrorKind kind = MirrorKind::TwoResistors;
  double vdd = 0.0;
  double i_in = 0.0, i_out = 0.0;  // A
  double subthreshold_power = 0.0; // W
  double gate_power = 0.0;         // W
  double power_mw = 0.0;
  double area_um2 = 0.0;
  double thd_percent = 0.0;
  std::string status = "ok";
};

/// power = VDD (I_in + I_out) + leakage; leakage counts subthreshold current
/// of devices at or below threshold (times |V_DS|) and gate tunneling current
/// of every device (times |V_GS|). area = sum of device footprints.
ReportRow power_and_area(const Circuit& circuit, const OperatingPoint& op, MirrorKind kind, double vdd,
                         const SimOptions& opts);

/// Values printed in the reference table for the four configurations.
struct ReferenceRow {
  double thd_percent, power_mw, area_um2;
};
ReferenceRow reference_values(MirrorKind kind);

/// Sinusoidal supply run used for distortion measurements.
struct ThdRun {
  double amplitude = 2.5;  // V
  double frequency = 50.0; // Hz
  double offset = 4.0;     // V, DC level the sine rides on
  int periods = 10;
  int steps_per_period = 1000;
  int n_harmonics = 20;
  std::string probe = "i(M2)";
};

/// Replaces the supply of a settled mirror by the sine of `run` and returns
/// the THD of `run.probe`.
ThdResult mirror_thd(const SettledPoint& settled, const SimOptions& opts, const ThdRun& run);

struct Table1Options {
  double vdd = 2.5;
  double r_load = 38.0e3;
  double m0 = 5.0e3;
  double vbias = 0.7;
  double temp = constants::kReferenceTemp;
  ThdRun thd;
  int jobs = 1;
};

struct AnalysisReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
};

ReportRow table1_row(MirrorKind kind, const Table1Options& options, const SimOptions& base = {});
AnalysisReport table1_report(const Table1Options& options, std::span<const MirrorKind> kinds = {},
                             const SimOptions& base = {});

// ---------------------------------------------------------------------------
// Calibration

struct CalibrationOptions {
  double target_time = 1.4;  // s
  double vdd = 2.5;          // V
  double tolerance = 0.01;   // relative
  double t_stop = 6.0;       // s
  double dt = 0.0;           // s, 0 -> t_stop / 10000
  double settle_band = 0.01;
  double mobility_lo = 1e-17;
  double mobility_hi = 1e-11;
  int max_iters = 100;
};

struct CalibrationResult {
  double mobility = 0.0;
  double switching_time = 0.0;
  int iterations = 0;
};

/// Switching time of I_out for the two-memristor mirror at `vdd`.
double mirror_switching_time(const MirrorConfig& config, const SimOptions& opts, double settle_band = 0.01);

/// Bisects mobility (log scale) until the switching time matches the target.
/// Throws Error for invalid targets and CalibrationError when the bracket
/// cannot contain the target.
CalibrationResult calibrate_mobility(const MirrorConfig& base, const CalibrationOptions& options);

// ---------------------------------------------------------------------------
// CSV conversions

CsvTable to_table(const MismatchTable& t);
CsvTable to_table(const std::vector<TemperatureRow>& rows);
CsvTable to_table(const std::vector<SweepRow>& rows, std::string_view path);
CsvTable to_table(const HysteresisTrace& trace);
CsvTable to_table(const AnalysisReport& report);
CsvTable to_table(std::span<const Waveform> waveforms);

}  // namespace mirrorsim::analysis
