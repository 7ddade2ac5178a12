#include "mirrorsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mirrorsim/error.hpp"
#include "mirrorsim/parallel.hpp"

namespace mirrorsim::analysis {

using netlist::to_lower;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string model_card_name(std::string_view dev) {
  if (dev == "nmos") return "nmod";
  if (dev == "pmos") return "pmod";
  if (dev == "memristor") return "memmod";
  return {};
}

std::string canonical_device(std::string dev) {
  if (dev == "t1") return "m1";
  if (dev == "t2") return "m2";
  if (dev == "tp") return "mp";
  return dev;
}

void set_param(std::vector<netlist::Param>& params, const std::string& key, double value) {
  std::erase_if(params, [&](const netlist::Param& p) { return p.key == key; });
  params.push_back({key, value});
}

}  // namespace

void apply_override(netlist::NetlistAst& ast, std::string_view raw_path, double value) {
  const std::string path = to_lower(raw_path);
  const auto dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
    throw LookupError("parameter path '" + std::string(raw_path) + "' is not of the form DEVICE.param");
  }
  const std::string dev = canonical_device(path.substr(0, dot));
  const std::string key = path.substr(dot + 1);
  const std::string model = model_card_name(dev);
  for (auto& card : ast.cards) {
    if (auto* d = std::get_if<netlist::DirectiveCard>(&card)) {
      if (model.empty() || d->kind != netlist::DirectiveKind::Model || d->args.empty()) continue;
      const auto* name = std::get_if<std::string>(&d->args.front());
      if (name && to_lower(*name) == model) {
        set_param(d->params, key, value);
        return;
      }
    } else if (auto* e = std::get_if<netlist::ElementCard>(&card)) {
      if (!model.empty() || to_lower(e->name) != dev) continue;
      if (e->device_letter() == 'r' && (key == "value" || key == "r")) {
        e->args.front() = value;
      } else if (e->device_letter() == 'v') {
        throw LookupError("source values are set through source.vdd or source.vbias");
      } else {
        set_param(e->params, key, value);
      }
      return;
    }
  }
  throw LookupError("no device '" + dev + "' in this circuit");
}

namespace {

double max_state_change(const Circuit& c, std::span<const devices::MemristorState> a,
                        std::span<const devices::MemristorState> b) {
  double change = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    change = std::max(change, std::abs(a[k].w - b[k].w) / c.memristors[k].params.length);
  }
  return change;
}

const std::string kOutputProbe = "i(" + std::string(netlist::kOutputTransistor) + ")";

}  // namespace

// ---------------------------------------------------------------------------

void MirrorSetup::set(std::string_view path, double value) {
  const std::string key = to_lower(path);
  const std::string quoted = "'" + std::string(path) + "'";
  const bool pmos = netlist::uses_pmos(config.kind);
  if (key == "vdd" || key == "source.vdd") {
    config.vdd = value;
    if (config.supply && config.supply->kind == devices::SourceKind::Dc) config.supply->dc_value = value;
  } else if (key == "vbias" || key == "source.vbias") {
    if (!pmos) throw LookupError("parameter path " + quoted + " applies to PMOS configurations only");
    config.vbias = value;
  } else if (key == "r_load") {
    config.r_load = value;
  } else if (key == "m0") {
    if (!netlist::uses_memristors(config.kind)) {
      throw LookupError("parameter path " + quoted + " applies to memristor configurations only");
    }
    config.m0 = value;
  } else {
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) {
      throw LookupError("unknown parameter path " + quoted);
    }
    overrides.emplace_back(canonical_device(key.substr(0, dot)) + key.substr(dot), value);
    try {
      (void)circuit();
    } catch (const LookupError& e) {
      overrides.pop_back();
      throw LookupError("unknown parameter path " + quoted + ": " + e.what());
    } catch (const ElaborationError& e) {
      overrides.pop_back();
      // Unknown names are lookup failures; anything else is a bad value.
      if (std::string_view(e.what()).find("unknown") != std::string_view::npos) {
        throw LookupError("unknown parameter path " + quoted + ": " + e.what());
      }
      throw Error("bad value for " + quoted + ": " + e.what());
    }
    return;
  }
  config.validate();
}

netlist::NetlistAst MirrorSetup::netlist() const {
  auto ast = netlist::builtin_mirror(config);
  for (const auto& [path, value] : overrides) apply_override(ast, path, value);
  return ast;
}

Circuit MirrorSetup::circuit() const { return netlist::elaborate(netlist()); }

std::vector<std::string> known_parameter_paths(MirrorKind kind) {
  std::vector<std::string> paths = {"vdd", "source.vdd", "r_load"};
  if (netlist::uses_pmos(kind)) paths.insert(paths.end(), {"vbias", "source.vbias"});
  if (netlist::uses_memristors(kind)) paths.push_back("m0");
  const std::vector<std::string> mos = {"vth0", "k_prime", "width", "length", "lambda", "n_sub",
                                        "t_ox", "m_ox", "phi_ox", "vth_tc", "mobility_exp"};
  std::vector<std::string> devices = {"T1", "T2", "nmos"};
  if (netlist::uses_pmos(kind)) devices.insert(devices.end(), {"TP", "pmos"});
  for (const auto& d : devices) {
    for (const auto& p : mos) paths.push_back(d + "." + p);
  }
  const bool mem = netlist::uses_memristors(kind);
  std::vector<std::string> loads;
  if (!netlist::uses_pmos(kind)) loads.push_back(mem ? "Y1" : "R1");
  loads.push_back(mem ? "Y2" : "R2");
  for (const auto& l : loads) {
    if (mem) {
      for (const char* p : {"r_on", "r_off", "length", "mobility", "polarity", "window_exponent", "m0"}) {
        paths.push_back(l + "." + p);
      }
    } else {
      for (const char* p : {"value", "tc", "footprint_w", "footprint_l"}) paths.push_back(l + "." + p);
    }
  }
  if (mem) {
    for (const char* p : {"r_on", "length", "mobility", "polarity", "window_exponent"}) {
      paths.push_back(std::string("memristor.") + p);
    }
  }
  return paths;
}

// ---------------------------------------------------------------------------

SettledPoint settle(const Circuit& circuit, const SimOptions& opts, const SettleOptions& so) {
  SettledPoint out{circuit, {}, circuit.initial_states(), 0.0};
  if (!circuit.memristors.empty()) {
    if (!(so.chunk > 0.0)) throw Error("settle: chunk length must be positive");
    SimOptions tr = opts;
    tr.t_stop = so.chunk;
    if (!(tr.dt > 0.0)) tr.dt = so.dt;
    while (true) {
      if (out.elapsed >= so.max_time) {
        throw NotSettled("memristor states still moving after " + std::to_string(so.max_time) + " s");
      }
      auto r = engine::simulate_transient(out.circuit, tr, {});
      const double moved = max_state_change(circuit, out.states, r.final_states);
      out.states = std::move(r.final_states);
      out.circuit = netlist::with_initial_states(std::move(out.circuit), out.states);
      out.elapsed += so.chunk;
      if (moved <= opts.reltol) break;
    }
  }
  out.op = engine::solve_operating_point(out.circuit, opts, out.states);
  return out;
}

// ---------------------------------------------------------------------------

MismatchTable mismatch_sweep(const MirrorSetup& setup, std::span<const double> load2_values,
                             const SimOptions& opts, int jobs) {
  const MirrorKind kind = setup.config.kind;
  if (netlist::uses_pmos(kind)) throw Error("mismatch sweep needs a two-load configuration (2r or 2m)");
  for (double v : load2_values) {
    if (!(v > 0.0)) throw Error("mismatch sweep: load values must be positive");
  }
  const std::string path = netlist::uses_memristors(kind) ? "Y2.r_off" : "R2.value";
  const std::string in_probe(netlist::kInputTransistor), out_probe(netlist::kOutputTransistor);

  MismatchTable table;
  table.kind = kind;
  table.load1 = setup.config.r_load;
  {
    MirrorSetup base = setup;
    base.set(path, table.load1);
    const auto p = settle(base.circuit(), opts);
    table.vds1 = p.op.voltage(p.circuit, "d1");
    table.k = 1.0 / (1.0 - table.vds1 / setup.config.vdd);
  }

  table.rows = parallel_map<MismatchRow>(load2_values.size(), jobs, [&](std::size_t i) {
    MismatchRow row;
    row.load2 = load2_values[i];
    row.rel_change = (row.load2 - table.load1) / table.load1;
    row.predicted = table.k * (table.load1 / row.load2 - 1.0);
    try {
      MirrorSetup s = setup;
      s.set(path, row.load2);
      const auto p = settle(s.circuit(), opts);
      const double i1 = p.op.current(p.circuit, in_probe);
      const double i2 = p.op.current(p.circuit, out_probe);
      row.simulated = (i2 - i1) / i1;
    } catch (const Error& e) {
      row.simulated = kNaN;
      row.error = e.what();
    }
    return row;
  });
  return table;
}

std::vector<TemperatureRow> temperature_sweep(const MirrorSetup& setup, std::span<const double> temps,
                                              const SimOptions& opts, int jobs) {
  for (double t : temps) {
    if (!(t > 0.0)) throw Error("temperature sweep: temperatures must be positive (K)");
  }
  const Circuit circuit = setup.circuit();
  return parallel_map<TemperatureRow>(temps.size(), jobs, [&](std::size_t i) {
    TemperatureRow row;
    row.temp = temps[i];
    try {
      SimOptions o = opts;
      o.temp = row.temp;
      const auto p = settle(circuit, o);
      row.i_in = p.op.current(p.circuit, netlist::kInputTransistor);
      row.i_out = p.op.current(p.circuit, netlist::kOutputTransistor);
    } catch (const Error& e) {
      row.i_in = row.i_out = kNaN;
      row.error = e.what();
    }
    return row;
  });
}

std::vector<SweepRow> parameter_sweep(const MirrorSetup& setup, std::string_view path,
                                      std::span<const double> values, const SimOptions& opts, int jobs) {
  if (!values.empty()) {
    MirrorSetup probe = setup;
    try {
      probe.set(path, values.front());
    } catch (const LookupError&) {
      throw;
    } catch (const Error&) {
      // Path is known; the value itself is reported on its row.
    }
  }
  return parallel_map<SweepRow>(values.size(), jobs, [&](std::size_t i) {
    SweepRow row;
    row.value = values[i];
    try {
      MirrorSetup s = setup;
      s.set(path, row.value);
      const auto p = settle(s.circuit(), opts);
      row.i_out = p.op.current(p.circuit, netlist::kOutputTransistor);
      row.v_out = p.op.voltage(p.circuit, netlist::kOutputNode);
    } catch (const Error& e) {
      row.i_out = row.v_out = kNaN;
      row.error = e.what();
    }
    return row;
  });
}

// ---------------------------------------------------------------------------

double pinched_loop_area(std::span<const double> v, std::span<const double> i) {
  if (v.size() != i.size()) throw Error("loop area: v and i differ in length");
  double total = 0.0;
  std::size_t start = 0;
  while (start < v.size()) {
    const bool positive = v[start] >= 0.0;
    std::size_t end = start;
    while (end < v.size() && (v[end] >= 0.0) == positive) ++end;
    double twice = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t n = k + 1 < end ? k + 1 : start;
      twice += v[k] * i[n] - v[n] * i[k];
    }
    total += 0.5 * std::abs(twice);
    start = end;
  }
  return total;
}

double max_line_deviation(std::span<const double> v, std::span<const double> i) {
  if (v.size() != i.size() || v.size() < 2) throw Error("line fit: need at least two samples");
  const double n = static_cast<double>(v.size());
  double sv = 0, si = 0, svv = 0, svi = 0, peak = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    sv += v[k];
    si += i[k];
    svv += v[k] * v[k];
    svi += v[k] * i[k];
    peak = std::max(peak, std::abs(i[k]));
  }
  const double denom = n * svv - sv * sv;
  const double slope = denom != 0.0 ? (n * svi - sv * si) / denom : 0.0;
  const double offset = (si - slope * sv) / n;
  if (peak == 0.0) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) worst = std::max(worst, std::abs(i[k] - offset - slope * v[k]));
  return worst / peak;
}

HysteresisTrace hysteresis_trace(const devices::MemristorParams& params, const devices::SourceSpec& drive,
                                 int cycles, const HysteresisOptions& options) {
  using netlist::format_number;
  if (drive.kind != devices::SourceKind::Sine) throw Error("hysteresis: drive must be sinusoidal");
  drive.validate();
  params.validate();
  if (!(drive.frequency > 0.0)) throw Error("hysteresis: drive frequency must be positive");
  if (cycles < 1) throw Error("hysteresis: need at least one cycle");
  if (options.steps_per_cycle < 20) throw Error("hysteresis: need at least 20 steps per cycle");

  std::ostringstream s;
  s << "* memristor hysteresis harness\n";
  s << ".model MEMMOD MEM r_on=" << format_number(params.r_on) << " r_off=" << format_number(params.r_off)
    << " length=" << format_number(params.length) << " mobility=" << format_number(params.mobility)
    << " polarity=" << params.polarity << " window_exponent=" << params.window_exponent << '\n';
  s << "V1 in 0 SIN(" << format_number(drive.dc_value) << ' ' << format_number(drive.amplitude) << ' '
    << format_number(drive.frequency) << ' ' << format_number(drive.phase) << ")\n";
  std::string device;
  if (options.substitute_resistor) {
    device = "R1";
    s << "R1 in 0 " << format_number(*options.substitute_resistor) << " tc=0\n";
  } else {
    device = "Y1";
    s << "Y1 in 0 MEMMOD ";
    if (options.initial_resistance) {
      s << "m0=" << format_number(*options.initial_resistance) << '\n';
    } else {
      s << "w0=" << format_number(0.5 * params.length) << '\n';
    }
  }
  s << ".end\n";
  const Circuit circuit = netlist::elaborate(netlist::parse(s.str()));

  SimOptions sim = options.sim;
  sim.dt = 1.0 / (drive.frequency * options.steps_per_cycle);
  sim.t_stop = cycles / drive.frequency;
  const std::vector<std::string> probes = {"v(in)", "i(" + device + ")"};
  auto result = engine::simulate_transient(circuit, sim, probes);

  HysteresisTrace trace;
  trace.t = std::move(result.waveforms[0].t);
  trace.v = std::move(result.waveforms[0].values);
  trace.i = std::move(result.waveforms[1].values);
  const std::size_t per = static_cast<std::size_t>(options.steps_per_cycle);
  const std::size_t first = trace.v.size() > per + 1 ? trace.v.size() - per - 1 : 0;
  const std::span<const double> v(trace.v.data() + first, trace.v.size() - first);
  const std::span<const double> i(trace.i.data() + first, trace.i.size() - first);
  trace.loop_area = pinched_loop_area(v, i);
  for (double x : i) trace.peak_current = std::max(trace.peak_current, std::abs(x));
  trace.line_deviation = max_line_deviation(v, i);
  return trace;
}

// ---------------------------------------------------------------------------

ReportRow power_and_area(const Circuit& circuit, const OperatingPoint& op, MirrorKind kind, double vdd,
                         const SimOptions& opts) {
  ReportRow row;
  row.kind = kind;
  row.vdd = vdd;
  row.i_in = op.current(circuit, netlist::kInputTransistor);
  row.i_out = op.current(circuit, netlist::kOutputTransistor);

  double area = 0.0;
  for (const auto& m : circuit.mosfets) {
    const double vgs = op.node_voltages[m.gate] - op.node_voltages[m.source];
    const double vds = op.node_voltages[m.drain] - op.node_voltages[m.source];
    const double sign = m.params.polarity == devices::Polarity::Pmos ? -1.0 : 1.0;
    if (sign * vgs <= devices::threshold_voltage(m.params, opts.temp)) {
      row.subthreshold_power +=
          std::abs(devices::subthreshold_leakage(vgs, vds, m.params, opts.temp)) * std::abs(vds);
    }
    const double vox = std::min(std::abs(vgs), std::nextafter(m.params.phi_ox, 0.0));
    row.gate_power += devices::gate_leakage(vox, m.params) * std::abs(vgs);
    area += devices::mosfet_area(m.params);
  }
  for (const auto& r : circuit.resistors) area += devices::resistor_area(r.params);
  area += static_cast<double>(circuit.memristors.size()) * devices::memristor_area();

  const double total = vdd * (row.i_in + row.i_out) + row.subthreshold_power + row.gate_power;
  row.power_mw = total * 1e3;
  row.area_um2 = area * 1e12;
  return row;
}

ReferenceRow reference_values(MirrorKind kind) {
  switch (kind) {
    case MirrorKind::TwoResistors: return {1.779, 0.1418, 17.44};
    case MirrorKind::TwoMemristors: return {1.774, 0.1416, 1.5372};
    case MirrorKind::PmosResistor: return {1.749, 0.2048, 10.88};
    case MirrorKind::PmosMemristor: return {1.705, 0.2040, 2.9286};
  }
  return {kNaN, kNaN, kNaN};
}

ThdResult mirror_thd(const SettledPoint& settled, const SimOptions& opts, const ThdRun& run) {
  if (!(run.frequency > 0.0) || run.periods < 1 || run.steps_per_period < 20) {
    throw Error("thd: invalid run settings");
  }
  Circuit sine = settled.circuit;
  bool found = false;
  for (auto& src : sine.sources) {
    if (to_lower(src.name) == to_lower(netlist::kSupplyName)) {
      src.spec = devices::SourceSpec::sine(run.offset, run.amplitude, run.frequency);
      found = true;
    }
  }
  if (!found) throw LookupError("thd: circuit has no supply source " + std::string(netlist::kSupplyName));
  SimOptions tr = opts;
  tr.dt = 1.0 / (run.frequency * run.steps_per_period);
  tr.t_stop = run.periods / run.frequency;
  const std::vector<std::string> probes = {run.probe};
  const auto w = engine::simulate_transient(sine, tr, probes).waveforms.front();
  return compute_thd(w, run.frequency, run.n_harmonics);
}

ReportRow table1_row(MirrorKind kind, const Table1Options& o, const SimOptions& base) {
  ReportRow row;
  row.kind = kind;
  row.vdd = o.vdd;
  try {
    MirrorConfig cfg;
    cfg.kind = kind;
    cfg.vdd = o.vdd;
    cfg.r_load = o.r_load;
    cfg.m0 = o.m0;
    if (netlist::uses_pmos(kind)) cfg.vbias = o.vbias;
    SimOptions sim = base;
    sim.temp = o.temp;
    const auto settled = settle(netlist::elaborate(netlist::builtin_mirror(cfg)), sim);
    row = power_and_area(settled.circuit, settled.op, kind, o.vdd, sim);

    row.thd_percent = mirror_thd(settled, sim, o.thd).percent();
  } catch (const Error& e) {
    row.thd_percent = kNaN;
    row.status = e.what();
  }
  return row;
}

AnalysisReport table1_report(const Table1Options& o, std::span<const MirrorKind> kinds, const SimOptions& base) {
  static constexpr MirrorKind kAll[] = {MirrorKind::TwoResistors, MirrorKind::TwoMemristors,
                                        MirrorKind::PmosResistor, MirrorKind::PmosMemristor};
  if (kinds.empty()) kinds = kAll;
  AnalysisReport report;
  report.rows = parallel_map<ReportRow>(kinds.size(), o.jobs, [&](std::size_t i) { return table1_row(kinds[i], o, base); });
  report.notes.push_back(
      "reference columns come from a BSIM transistor model; THD and power are compared by ordering, not value");
  for (const auto& r : report.rows) {
    const auto ref = reference_values(r.kind);
    std::ostringstream s;
    s << netlist::short_name(r.kind) << ": area from device footprints " << csv_number(r.area_um2)
      << " um^2 vs printed " << csv_number(ref.area_um2) << " um^2 (delta " << csv_number(r.area_um2 - ref.area_um2)
      << " um^2)";
    report.notes.push_back(s.str());
  }
  return report;
}

// ---------------------------------------------------------------------------

double mirror_switching_time(const MirrorConfig& config, const SimOptions& opts, double settle_band) {
  const auto circuit = netlist::elaborate(netlist::builtin_mirror(config));
  const std::vector<std::string> probes = {kOutputProbe};
  const auto w = engine::simulate_transient(circuit, opts, probes).waveforms.front();
  return switching_time(w, settle_band);
}

CalibrationResult calibrate_mobility(const MirrorConfig& base, const CalibrationOptions& o) {
  if (!(o.target_time > 0.0)) throw Error("calibrate: target switching time must be positive");
  if (!(o.vdd > 0.0)) throw Error("calibrate: vdd must be positive");
  if (!(o.tolerance > 0.0 && o.tolerance < 1.0)) throw Error("calibrate: tolerance must lie in (0, 1)");
  if (!(o.mobility_lo > 0.0 && o.mobility_hi > o.mobility_lo)) throw Error("calibrate: invalid mobility bracket");
  SimOptions sim;
  sim.t_stop = o.t_stop;
  sim.dt = o.dt;
  const double dt = sim.validate_transient();
  if (o.target_time < dt) {
    throw CalibrationError("calibrate: target " + csv_number(o.target_time) + " s is shorter than the time step " +
                           csv_number(dt) + " s");
  }
  if (o.target_time > 0.9 * o.t_stop) {
    throw CalibrationError("calibrate: target " + csv_number(o.target_time) +
                           " s does not fit in the settle window of a " + csv_number(o.t_stop) + " s run");
  }

  MirrorConfig cfg = base;
  cfg.kind = MirrorKind::TwoMemristors;
  cfg.vbias.reset();
  cfg.supply.reset();
  cfg.vdd = o.vdd;
  CalibrationResult result;
  auto time_at = [&](double mobility) {
    cfg.memristor.mobility = mobility;
    ++result.iterations;
    try {
      return mirror_switching_time(cfg, sim, o.settle_band);
    } catch (const NotSettled&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Switching time falls monotonically with mobility.
  double lo = std::log(o.mobility_lo), hi = std::log(o.mobility_hi);
  const double t_lo = time_at(o.mobility_lo), t_hi = time_at(o.mobility_hi);
  if (!(t_lo >= o.target_time && t_hi <= o.target_time)) {
    throw CalibrationError("calibrate: mobility bracket [" + csv_number(o.mobility_lo) + ", " +
                           csv_number(o.mobility_hi) + "] gives switching times [" + csv_number(t_hi) + ", " +
                           csv_number(t_lo) + "] s, which do not contain the target");
  }
  const double goal = 0.25 * o.tolerance * o.target_time;
  double best = std::abs(t_hi - o.target_time) < std::abs(t_lo - o.target_time) ? o.mobility_hi : o.mobility_lo;
  double best_t = best == o.mobility_hi ? t_hi : t_lo;
  for (int k = 0; k < o.max_iters && std::abs(best_t - o.target_time) > goal; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double t = time_at(std::exp(mid));
    if (std::abs(t - o.target_time) < std::abs(best_t - o.target_time)) {
      best = std::exp(mid);
      best_t = t;
    }
    (t > o.target_time ? lo : hi) = mid;
    if (hi - lo < 1e-12) break;
  }
  if (std::abs(best_t - o.target_time) > o.tolerance * o.target_time) {
    throw CalibrationError("calibrate: bisection stalled at " + csv_number(best_t) + " s");
  }
  result.mobility = best;
  result.switching_time = best_t;
  return result;
}

// ---------------------------------------------------------------------------

CsvTable to_table(const MismatchTable& t) {
  const bool mem = netlist::uses_memristors(t.kind);
  CsvTable out;
  out.header = {csv_column(mem ? "m2" : "r2", "Ohm"), csv_column("delta_r_rel", ""), csv_column("delta_i_sim", ""),
                csv_column("delta_i_pred", ""), "status"};
  for (const auto& r : t.rows) {
    out.rows.push_back({r.load2, r.rel_change, r.simulated, r.predicted, r.error.empty() ? "ok" : r.error});
  }
  return out;
}

CsvTable to_table(const std::vector<TemperatureRow>& rows) {
  CsvTable out;
  out.header = {csv_column("temp", "K"), csv_column("temp", "degC"), csv_column("i_in", "A"), csv_column("i_out", "A"),
                "status"};
  for (const auto& r : rows) {
    out.rows.push_back({r.temp, constants::kelvin_to_celsius(r.temp), r.i_in, r.i_out,
                        r.error.empty() ? "ok" : r.error});
  }
  return out;
}

CsvTable to_table(const std::vector<SweepRow>& rows, std::string_view path) {
  CsvTable out;
  out.header = {std::string(path), csv_column("i_out", "A"), csv_column("v_out", "V"), "status"};
  for (const auto& r : rows) out.rows.push_back({r.value, r.i_out, r.v_out, r.error.empty() ? "ok" : r.error});
  return out;
}

CsvTable to_table(const HysteresisTrace& trace) {
  CsvTable out;
  out.header = {csv_column("time", "s"), csv_column("v", "V"), csv_column("i", "A")};
  for (std::size_t k = 0; k < trace.t.size(); ++k) out.rows.push_back({trace.t[k], trace.v[k], trace.i[k]});
  return out;
}

CsvTable to_table(const AnalysisReport& report) {
  CsvTable out;
  out.header = {"config",
                csv_column("thd", "%"),
                csv_column("power", "mW"),
                csv_column("area", "um^2"),
                csv_column("i_in", "A"),
                csv_column("i_out", "A"),
                csv_column("subthreshold_power", "W"),
                csv_column("gate_power", "W"),
                csv_column("ref_thd", "%"),
                csv_column("ref_power", "mW"),
                csv_column("ref_area", "um^2"),
                csv_column("area_delta", "um^2"),
                "status"};
  for (const auto& r : report.rows) {
    const auto ref = reference_values(r.kind);
    out.rows.push_back({std::string(netlist::short_name(r.kind)), r.thd_percent, r.power_mw, r.area_um2, r.i_in,
                        r.i_out, r.subthreshold_power, r.gate_power, ref.thd_percent, ref.power_mw, ref.area_um2,
                        r.area_um2 - ref.area_um2, r.status});
  }
  return out;
}

CsvTable to_table(std::span<const Waveform> waveforms) {
  CsvTable out;
  out.header.push_back(csv_column("time", "s"));
  for (const auto& w : waveforms) out.header.push_back(csv_column(w.name, w.unit));
  const std::size_t n = waveforms.empty() ? 0 : waveforms.front().t.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<CsvCell> row{waveforms.front().t[k]};
    for (const auto& w : waveforms) row.emplace_back(w.values[k]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace mirrorsim::analysis
