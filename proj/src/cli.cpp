#include "mirrorsim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mirrorsim/analysis.hpp"
#include "mirrorsim/error.hpp"

namespace mirrorsim::cli {

namespace {

namespace fs = std::filesystem;
using analysis::MirrorSetup;
using engine::SimOptions;
using netlist::format_number;

class IoError : public Error {
 public:
  using Error::Error;
};

class Diagnostics {
 public:
  Diagnostics(std::ostream& err, bool color) : err_(err), color_(color) {}

  void error(const std::string& msg) { err_ << paint("31", "error:") << ' ' << msg << '\n'; }
  void note(const std::string& msg) { err_ << paint("36", "note:") << ' ' << msg << '\n'; }
  void trace(const std::string& line) { err_ << "  " << line << '\n'; }

 private:
  std::string paint(const char* code, const std::string& text) const {
    return color_ ? "\x1b[" + std::string(code) + "m" + text + "\x1b[0m" : text;
  }
  std::ostream& err_;
  bool color_;
};

struct CommonFlags {
  std::vector<std::string> sets;
  std::string output = "-";
  int verbose = 0;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_sets = true) {
  if (with_sets) {
    cmd->add_option("--set", f.sets,
                    "Override KEY=VALUE (repeatable): temp (degC), dt, t_stop, gmin, reltol, abstol, vntol, "
                    "or a dotted device path such as T2.width, source.vbias");
  }
  cmd->add_option("-o,--output", f.output, "Output file, '-' for stdout")->capture_default_str();
  cmd->add_flag("-v,--verbose", f.verbose, "Print progress notes to stderr (repeat for more)");
  cmd->add_option("--jobs", f.jobs, "Worker threads for sweeps; output order does not depend on it")
      ->capture_default_str();
}

double parse_value(const std::string& what, const std::string& text) {
  const auto v = netlist::parse_number(text);
  if (!v) throw Error(what + ": '" + text + "' is not a number");
  return *v;
}

/// "start:stop:step" (inclusive) or "a,b,c".
std::vector<double> parse_list(const std::string& what, const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream s(text);
    for (std::string p; std::getline(s, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(what + ": expected start:stop:step");
    const double a = parse_value(what, parts[0]), b = parse_value(what, parts[1]), step = parse_value(what, parts[2]);
    if (!(step > 0.0) || b < a) throw Error(what + ": need step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    if (n > 1000000) throw Error(what + ": too many points");
    for (long k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * step);
  } else {
    std::stringstream s(text);
    for (std::string p; std::getline(s, p, ',');) out.push_back(parse_value(what, p));
  }
  if (out.empty()) throw Error(what + ": empty list");
  return out;
}

std::pair<std::string, double> split_set(const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("--set " + item + ": expected KEY=VALUE");
  return {item.substr(0, eq), parse_value("--set " + item.substr(0, eq), item.substr(eq + 1))};
}

/// Simulator-level keys; returns false for anything else.
bool apply_sim_key(SimOptions& o, const std::string& key, double v) {
  const std::string k = netlist::to_lower(key);
  if (k == "temp") {
    o.temp = constants::celsius_to_kelvin(v);
  } else if (k == "dt") {
    o.dt = v;
  } else if (k == "t_stop") {
    o.t_stop = v;
  } else if (k == "gmin") {
    o.gmin = v;
  } else if (k == "reltol") {
    o.reltol = v;
  } else if (k == "abstol") {
    o.abstol = v;
  } else if (k == "vntol") {
    o.vntol = v;
  } else {
    return false;
  }
  return true;
}

void check_output_path(const std::string& path) {
  if (path == "-") return;
  const fs::path p(path);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("output directory '" + dir.string() + "' does not exist");
  if (fs::is_directory(p, ec)) throw IoError("output path '" + path + "' is a directory");
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.close();
  if (!f) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) throw IoError("'" + path + "' is a directory");
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read of '" + path + "' failed");
  return text;
}

// Value of v(node), i(device), r(mem) or w(mem) at a DC solution.
double probe_value(const netlist::Circuit& c, const engine::OperatingPoint& op,
                   std::span<const devices::MemristorState> states, const std::string& probe) {
  const std::string p = netlist::to_lower(probe);
  if (p.size() < 4 || p[1] != '(' || p.back() != ')') throw LookupError("malformed probe '" + probe + "'");
  const std::string target = p.substr(2, p.size() - 3);
  switch (p[0]) {
    case 'v': return op.voltage(c, target);
    case 'i': return op.current(c, target);
    case 'r':
    case 'w':
      for (std::size_t k = 0; k < c.memristors.size(); ++k) {
        if (netlist::to_lower(c.memristors[k].name) == target) {
          return p[0] == 'r' ? devices::memristance(states[k], c.memristors[k].params) : states[k].w;
        }
      }
      throw LookupError("probe '" + probe + "': unknown memristor");
    default: throw LookupError("unknown probe kind in '" + probe + "'");
  }
}

std::string probe_unit(const std::string& probe) {
  switch (std::tolower(static_cast<unsigned char>(probe.empty() ? ' ' : probe[0]))) {
    case 'v': return "V";
    case 'i': return "A";
    case 'r': return "Ohm";
    case 'w': return "m";
    default: return "";
  }
}

CsvTable operating_point_table(const netlist::Circuit& c, const engine::OperatingPoint& op,
                               std::span<const devices::MemristorState> states, const std::vector<std::string>& probes) {
  CsvTable t;
  std::vector<CsvCell> row;
  for (const auto& p : probes) {
    t.header.push_back(csv_column(p, probe_unit(p)));
    row.emplace_back(probe_value(c, op, states, p));
  }
  t.rows.push_back(std::move(row));
  return t;
}

// ---------------------------------------------------------------------------

struct RunFlags {
  CommonFlags common;
  std::string file;
  std::vector<std::string> probes;
};

int cmd_run(const RunFlags& f, std::ostream& out, Diagnostics& diag) {
  SimOptions opts;
  bool temp_set = false, dt_set = false, stop_set = false;
  std::vector<std::pair<std::string, double>> device_sets;
  for (const auto& item : f.common.sets) {
    auto [key, value] = split_set(item);
    const std::string k = netlist::to_lower(key);
    if (apply_sim_key(opts, key, value)) {
      temp_set |= k == "temp";
      dt_set |= k == "dt";
      stop_set |= k == "t_stop";
    } else {
      device_sets.emplace_back(key, value);
    }
  }
  opts.validate_tolerances();
  check_output_path(f.common.output);

  auto ast = netlist::parse(read_file(f.file));
  for (const auto& [key, value] : device_sets) analysis::apply_override(ast, key, value);
  const auto circuit = netlist::elaborate(ast);
  if (circuit.temp && !temp_set) opts.temp = *circuit.temp;
  const auto probes = f.probes.empty() ? engine::default_probes(circuit) : f.probes;

  CsvTable table;
  if (circuit.tran || dt_set || stop_set) {
    if (circuit.tran) {
      if (!dt_set) opts.dt = circuit.tran->step;
      if (!stop_set) opts.t_stop = circuit.tran->stop;
    }
    const auto waves = engine::run_transient(circuit, opts, probes);
    table = analysis::to_table(std::span<const engine::Waveform>(waves));
    if (f.common.verbose) diag.note("transient: " + std::to_string(waves.empty() ? 0 : waves.front().t.size()) + " samples");
  } else if (circuit.dc_sweep) {
    const auto& sw = *circuit.dc_sweep;
    auto c = circuit;
    auto it = std::find_if(c.sources.begin(), c.sources.end(),
                           [&](const auto& s) { return netlist::to_lower(s.name) == netlist::to_lower(sw.source); });
    const auto values = parse_list(".dc", format_number(sw.start) + ":" + format_number(sw.stop) + ":" +
                                              format_number(sw.step));
    table.header.push_back(csv_column(it->name, "V"));
    for (const auto& p : probes) table.header.push_back(csv_column(p, probe_unit(p)));
    const auto states = c.initial_states();
    std::vector<double> guess;
    for (double v : values) {
      it->spec = devices::SourceSpec::dc(v);
      const auto op = engine::solve_operating_point(c, opts, states, 0.0, guess);
      guess = op.solution;
      std::vector<CsvCell> row{v};
      for (const auto& p : probes) row.emplace_back(probe_value(c, op, states, p));
      table.rows.push_back(std::move(row));
    }
  } else {
    const auto states = circuit.initial_states();
    const auto op = engine::solve_dc(circuit, opts);
    if (f.common.verbose) {
      diag.note("operating point: " + std::to_string(op.iterations) + " Newton iterations, max KCL residual " +
                csv_number(op.max_kcl_residual) + " A");
    }
    table = operating_point_table(circuit, op, states, probes);
  }
  emit(f.common.output, to_csv(table), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct MirrorFlags {
  CommonFlags common;
  std::string config;
  std::string analysis = "dc";
  bool emit_netlist = false;
  std::vector<std::string> probes;
  std::optional<double> amplitude, frequency, offset;
  int periods = 10;
  int steps_per_period = 1000;
  int harmonics = 20;
  int cycles = 2;
  int steps_per_cycle = 2000;
  std::string temps = "0:100:10";
  std::string rel = "-0.2:0.2:0.05";
  std::string param;
  std::string values;
};

const std::vector<std::string> kAnalyses = {"dc", "tran", "thd", "temp-sweep", "mismatch", "param-sweep",
                                            "hysteresis", "table1"};

int cmd_mirror(const MirrorFlags& f, std::ostream& out, Diagnostics& diag) {
  const std::string analysis_kind = netlist::to_lower(f.analysis);
  if (std::find(kAnalyses.begin(), kAnalyses.end(), analysis_kind) == kAnalyses.end()) {
    throw LookupError("unknown analysis '" + f.analysis + "'");
  }
  const bool all = netlist::to_lower(f.config) == "all";
  if (all && analysis_kind != "table1") throw LookupError("configuration 'all' is only valid with --analysis table1");
  const auto kind = all ? std::optional(netlist::MirrorKind::TwoResistors) : netlist::kind_from_short_name(f.config);
  if (!kind) throw LookupError("unknown configuration '" + f.config + "' (expected 2r, 2m, pmos-r, pmos-m)");
  if (f.common.jobs < 1) throw Error("--jobs must be at least 1");

  MirrorSetup setup;
  setup.config.kind = *kind;
  if (netlist::uses_pmos(*kind)) setup.config.vbias = 0.7;
  SimOptions opts;
  bool stop_set = false, temp_set = false;
  for (const auto& item : f.common.sets) {
    auto [key, value] = split_set(item);
    if (apply_sim_key(opts, key, value)) {
      stop_set |= netlist::to_lower(key) == "t_stop";
      temp_set |= netlist::to_lower(key) == "temp";
    } else {
      setup.set(key, value);
    }
  }
  opts.validate_tolerances();
  check_output_path(f.common.output);

  if (f.emit_netlist) {
    emit(f.common.output, netlist::print(setup.netlist()), out);
    return kOk;
  }

  const int jobs = f.common.jobs;
  CsvTable table;
  if (analysis_kind == "dc") {
    const auto p = analysis::settle(setup.circuit(), opts);
    if (f.common.verbose && p.elapsed > 0) diag.note("settled after " + csv_number(p.elapsed) + " s");
    table = operating_point_table(p.circuit, p.op, p.states,
                                  f.probes.empty() ? engine::default_probes(p.circuit) : f.probes);
  } else if (analysis_kind == "tran") {
    if (!stop_set) opts.t_stop = 6.0;
    const auto circuit = setup.circuit();
    const auto waves = engine::run_transient(circuit, opts, f.probes.empty() ? engine::default_probes(circuit) : f.probes);
    table = analysis::to_table(std::span<const engine::Waveform>(waves));
  } else if (analysis_kind == "thd") {
    analysis::ThdRun run;
    run.amplitude = f.amplitude.value_or(run.amplitude);
    run.frequency = f.frequency.value_or(run.frequency);
    run.offset = f.offset.value_or(run.offset);
    run.periods = f.periods;
    run.steps_per_period = f.steps_per_period;
    run.n_harmonics = f.harmonics;
    if (!f.probes.empty()) run.probe = f.probes.front();
    const auto settled = analysis::settle(setup.circuit(), opts);
    const auto r = analysis::mirror_thd(settled, opts, run);
    table.header = {csv_column("thd", "%"), csv_column("fundamental", "A")};
    std::vector<CsvCell> row{r.percent(), r.fundamental};
    for (std::size_t k = 0; k < r.harmonics.size(); ++k) {
      table.header.push_back(csv_column("h" + std::to_string(k + 2), "A"));
      row.emplace_back(r.harmonics[k]);
    }
    table.rows.push_back(std::move(row));
  } else if (analysis_kind == "temp-sweep") {
    auto temps = parse_list("--temps", f.temps);
    for (double& t : temps) t = constants::celsius_to_kelvin(t);
    table = analysis::to_table(analysis::temperature_sweep(setup, temps, opts, jobs));
  } else if (analysis_kind == "mismatch") {
    auto loads = parse_list("--rel", f.rel);
    for (double& r : loads) r = setup.config.r_load * (1.0 + r);
    table = analysis::to_table(analysis::mismatch_sweep(setup, loads, opts, jobs));
  } else if (analysis_kind == "param-sweep") {
    if (f.param.empty() || f.values.empty()) throw Error("param-sweep needs --param and --values");
    const auto values = parse_list("--values", f.values);
    table = analysis::to_table(analysis::parameter_sweep(setup, f.param, values, opts, jobs), f.param);
  } else if (analysis_kind == "hysteresis") {
    const auto circuit = setup.circuit();
    devices::MemristorParams params = setup.config.memristor;
    params.r_off = setup.config.r_load;
    if (!circuit.memristors.empty()) params = circuit.memristors.back().params;
    analysis::HysteresisOptions ho;
    ho.steps_per_cycle = f.steps_per_cycle;
    ho.sim = opts;
    const auto drive = devices::SourceSpec::sine(f.offset.value_or(0.0), f.amplitude.value_or(1.0),
                                                 f.frequency.value_or(1.0));
    const auto trace = analysis::hysteresis_trace(params, drive, f.cycles, ho);
    if (f.common.verbose) diag.note("loop area " + csv_number(trace.loop_area) + " V*A");
    table = analysis::to_table(trace);
  } else {  // table1
    if (!setup.overrides.empty()) {
      throw Error("table1 accepts only vdd, vbias, r_load, m0 and temp overrides");
    }
    analysis::Table1Options o;
    o.vdd = setup.config.vdd;
    o.r_load = setup.config.r_load;
    o.m0 = setup.config.m0;
    if (setup.config.vbias) o.vbias = *setup.config.vbias;
    if (temp_set) o.temp = opts.temp;
    o.thd.amplitude = f.amplitude.value_or(o.thd.amplitude);
    o.thd.frequency = f.frequency.value_or(o.thd.frequency);
    o.thd.offset = f.offset.value_or(o.thd.offset);
    o.thd.periods = f.periods;
    o.thd.steps_per_period = f.steps_per_period;
    o.thd.n_harmonics = f.harmonics;
    o.jobs = jobs;
    std::vector<netlist::MirrorKind> kinds;
    if (!all) kinds.push_back(*kind);
    const auto report = analysis::table1_report(o, kinds, opts);
    for (const auto& n : report.notes) diag.note(n);
    table = analysis::to_table(report);
  }
  emit(f.common.output, to_csv(table), out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct CalibrateFlags {
  CommonFlags common;
  analysis::CalibrationOptions options;
};

int cmd_calibrate(const CalibrateFlags& f, std::ostream& out, Diagnostics& diag) {
  check_output_path(f.common.output);
  netlist::MirrorConfig cfg;
  cfg.kind = netlist::MirrorKind::TwoMemristors;
  const auto r = analysis::calibrate_mobility(cfg, f.options);
  if (f.common.verbose) diag.note(std::to_string(r.iterations) + " transient runs");
  std::ostringstream s;
  const auto& m = cfg.memristor;
  s << "* calibrated memristor model: switching time " << csv_number(r.switching_time) << " s at vdd = "
    << format_number(f.options.vdd) << " V\n";
  s << ".model MEMMOD MEM r_on=" << format_number(m.r_on) << " r_off=" << format_number(cfg.r_load)
    << " length=" << format_number(m.length) << " mobility=" << format_number(r.mobility)
    << " polarity=" << m.polarity << " window_exponent=" << m.window_exponent << '\n';
  emit(f.common.output, s.str(), out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliEnvironment& env) {
  const bool color = env.color && std::getenv("MIRRORSIM_NO_COLOR") == nullptr;
  Diagnostics diag(err, color);

  CLI::App app{"Current-mirror circuit simulator with memristive and resistive loads", "mirrorsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mirrorsim 1.0.0");

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a netlist file (.tran, .dc, or operating point)");
  run_cmd->add_option("file", run.file, "Netlist file")->required();
  run_cmd->add_option("--probe", run.probes, "Probe such as v(out), i(R1), r(Y1), w(Y1) (repeatable)");
  add_common(run_cmd, run.common);

  MirrorFlags mir;
  auto* mir_cmd = app.add_subcommand("mirror", "Simulate a built-in current mirror");
  mir_cmd->add_option("config", mir.config, "2r, 2m, pmos-r, pmos-m (or 'all' for table1)")->required();
  mir_cmd->add_option("--analysis", mir.analysis, "dc, tran, thd, temp-sweep, mismatch, param-sweep, hysteresis, table1")
      ->capture_default_str();
  mir_cmd->add_flag("--emit-netlist", mir.emit_netlist, "Print the generated netlist instead of simulating");
  mir_cmd->add_option("--probe", mir.probes, "Probe(s) for dc/tran; first probe for thd (default i(M2))");
  mir_cmd->add_option("--amplitude", mir.amplitude, "Sine amplitude in V (thd: 2.5, hysteresis: 1)");
  mir_cmd->add_option("--frequency", mir.frequency, "Sine frequency in Hz (thd: 50, hysteresis: 1)");
  mir_cmd->add_option("--offset", mir.offset, "Sine DC offset in V (thd: 4, hysteresis: 0)");
  mir_cmd->add_option("--periods", mir.periods, "thd: periods simulated")->capture_default_str();
  mir_cmd->add_option("--steps-per-period", mir.steps_per_period, "thd: time steps per period")->capture_default_str();
  mir_cmd->add_option("--harmonics", mir.harmonics, "thd: highest harmonic order")->capture_default_str();
  mir_cmd->add_option("--cycles", mir.cycles, "hysteresis: drive cycles")->capture_default_str();
  mir_cmd->add_option("--steps-per-cycle", mir.steps_per_cycle, "hysteresis: time steps per cycle")
      ->capture_default_str();
  mir_cmd->add_option("--temps", mir.temps, "temp-sweep: degC list a,b,c or start:stop:step")->capture_default_str();
  mir_cmd->add_option("--rel", mir.rel, "mismatch: relative load changes")->capture_default_str();
  mir_cmd->add_option("--param", mir.param, "param-sweep: dotted parameter path, e.g. T2.width");
  mir_cmd->add_option("--values", mir.values, "param-sweep: values a,b,c or start:stop:step");
  add_common(mir_cmd, mir.common);

  CalibrateFlags cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit memristor mobility to a target switching time");
  cal_cmd->add_option("--target", cal.options.target_time, "Target switching time in s")->capture_default_str();
  cal_cmd->add_option("--vdd", cal.options.vdd, "Supply voltage in V")->capture_default_str();
  cal_cmd->add_option("--tolerance", cal.options.tolerance, "Relative tolerance")->capture_default_str();
  cal_cmd->add_option("--t-stop", cal.options.t_stop, "Length of each transient run in s")->capture_default_str();
  cal_cmd->add_option("--dt", cal.options.dt, "Time step in s (0 = t-stop / 10000)")->capture_default_str();
  cal_cmd->add_option("--band", cal.options.settle_band, "Settle band as a fraction of the final value")
      ->capture_default_str();
  add_common(cal_cmd, cal.common, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    diag.error(e.what());
    err << "run 'mirrorsim --help' for usage\n";
    return kInputError;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run, out, diag);
    if (mir_cmd->parsed()) return cmd_mirror(mir, out, diag);
    return cmd_calibrate(cal, out, diag);
  } catch (const IoError& e) {
    diag.error(e.what());
    return kIoError;
  } catch (const NonConvergence& e) {
    diag.error(e.what());
    for (const auto& line : e.trace()) diag.trace(line);
    return kSimulationError;
  } catch (const SingularMatrix& e) {
    diag.error(e.what());
    return kSimulationError;
  } catch (const NotSettled& e) {
    diag.error(e.what());
    return kSimulationError;
  } catch (const CalibrationError& e) {
    diag.error(e.what());
    return kSimulationError;
  } catch (const Error& e) {
    diag.error(e.what());
    return kInputError;
  } catch (const std::exception& e) {
    diag.error(std::string("internal: ") + e.what());
    return kSimulationError;
  }
}

}  // namespace mirrorsim::cli
