#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mirrorsim/analysis.hpp"
#include "mirrorsim/cli.hpp"
#include "mirrorsim/devices.hpp"
#include "mirrorsim/engine.hpp"
#include "mirrorsim/error.hpp"
#include "mirrorsim/netlist.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace mirrorsim;

namespace {

engine::SimOptions sim_options(double temp, double dt, double t_stop) {
  engine::SimOptions o;
  o.temp = temp;
  o.dt = dt;
  o.t_stop = t_stop;
  return o;
}

// Parsed and elaborated netlist.
struct PyCircuit {
  netlist::NetlistAst ast;
  netlist::Circuit circuit;

  explicit PyCircuit(const std::string& text) : ast(netlist::parse(text)), circuit(netlist::elaborate(ast)) {}

  py::dict operating_point(double temp) const {
    const auto op = engine::solve_dc(circuit, sim_options(temp, 0.0, 0.0));
    py::dict v, i;
    for (int n = 1; n < circuit.node_count(); ++n) v[py::str(circuit.node_names[n])] = op.node_voltages[n];
    for (std::size_t k = 0; k < circuit.resistors.size(); ++k) i[py::str(circuit.resistors[k].name)] = op.resistor_currents[k];
    for (std::size_t k = 0; k < circuit.memristors.size(); ++k) i[py::str(circuit.memristors[k].name)] = op.memristor_currents[k];
    for (std::size_t k = 0; k < circuit.mosfets.size(); ++k) i[py::str(circuit.mosfets[k].name)] = op.mosfet_currents[k];
    for (std::size_t k = 0; k < circuit.sources.size(); ++k) i[py::str(circuit.sources[k].name)] = op.source_currents[k];
    return py::dict("voltages"_a = v, "currents"_a = i, "iterations"_a = op.iterations,
                    "max_kcl_residual"_a = op.max_kcl_residual);
  }

  py::dict transient(double t_stop, double dt, std::vector<std::string> probes, double temp) const {
    if (probes.empty()) probes = engine::default_probes(circuit);
    std::vector<engine::Waveform> w;
    {
      py::gil_scoped_release release;
      w = engine::run_transient(circuit, sim_options(temp, dt, t_stop), probes);
    }
    py::dict out;
    out["time"] = w.empty() ? std::vector<double>{} : w.front().t;
    for (const auto& wave : w) out[py::str(wave.name)] = wave.values;
    return out;
  }

  std::string text() const { return netlist::print(ast); }
};

py::dict report_row(const analysis::ReportRow& r) {
  return py::dict("config"_a = std::string(netlist::short_name(r.kind)), "vdd"_a = r.vdd, "i_in"_a = r.i_in,
                  "i_out"_a = r.i_out, "power_mw"_a = r.power_mw, "area_um2"_a = r.area_um2,
                  "thd_percent"_a = r.thd_percent, "subthreshold_power"_a = r.subthreshold_power,
                  "gate_power"_a = r.gate_power, "status"_a = r.status);
}

}  // namespace

PYBIND11_MODULE(_mirrorsim, m) {
  m.doc() = "Current-mirror simulator with memristive and resistive loads";

  auto base = py::register_exception<Error>(m, "MirrorsimError");
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<NonConvergence>(m, "NonConvergence", base);
  py::register_exception<NotSettled>(m, "NotSettled", base);
  py::register_exception<CalibrationError>(m, "CalibrationError", base);

  py::enum_<netlist::MirrorKind>(m, "MirrorKind")
      .value("TWO_RESISTORS", netlist::MirrorKind::TwoResistors)
      .value("TWO_MEMRISTORS", netlist::MirrorKind::TwoMemristors)
      .value("PMOS_RESISTOR", netlist::MirrorKind::PmosResistor)
      .value("PMOS_MEMRISTOR", netlist::MirrorKind::PmosMemristor);

  py::class_<PyCircuit>(m, "Circuit")
      .def(py::init<const std::string&>(), "text"_a)
      .def("operating_point", &PyCircuit::operating_point, "temp"_a = constants::kReferenceTemp)
      .def("transient", &PyCircuit::transient, "t_stop"_a, "dt"_a = 0.0, "probes"_a = std::vector<std::string>{},
           "temp"_a = constants::kReferenceTemp)
      .def("netlist", &PyCircuit::text)
      .def_property_readonly("nodes", [](const PyCircuit& c) { return c.circuit.node_names; });

  m.def(
      "mirror_netlist",
      [](netlist::MirrorKind kind, double vdd, std::optional<double> vbias, double r_load, double m0) {
        netlist::MirrorConfig cfg;
        cfg.kind = kind;
        cfg.vdd = vdd;
        cfg.r_load = r_load;
        cfg.m0 = m0;
        cfg.vbias = netlist::uses_pmos(kind) && !vbias ? std::optional<double>(0.7) : vbias;
        return netlist::print(netlist::builtin_mirror(cfg));
      },
      "kind"_a, "vdd"_a = 2.5, "vbias"_a = py::none(), "r_load"_a = 38e3, "m0"_a = 5e3);

  m.def("thermal_voltage", &devices::thermal_voltage, "temp"_a);
  m.def(
      "memristance",
      [](double w, double r_on, double r_off, double length) {
        devices::MemristorParams p;
        p.r_on = r_on;
        p.r_off = r_off;
        p.length = length;
        return devices::memristance({w}, p);
      },
      "w"_a, "r_on"_a = 100.0, "r_off"_a = 38e3, "length"_a = 10e-9);
  m.def(
      "subthreshold_leakage",
      [](double vgs, double vds, double temp) {
        return devices::subthreshold_leakage(vgs, vds, devices::MosfetParams::nmos_default(), temp);
      },
      "vgs"_a, "vds"_a, "temp"_a = constants::kReferenceTemp);
  m.def(
      "gate_leakage", [](double vox) { return devices::gate_leakage(vox, devices::MosfetParams::nmos_default()); },
      "vox"_a);

  m.def(
      "compute_thd",
      [](std::vector<double> t, std::vector<double> values, double f0, int n_harmonics,
         std::optional<double> discard) {
        const engine::Waveform w{"x", "", std::move(t), std::move(values)};
        const auto r = analysis::compute_thd(w, f0, n_harmonics, discard);
        return py::dict("thd"_a = r.thd, "fundamental"_a = r.fundamental, "harmonics"_a = r.harmonics);
      },
      "t"_a, "values"_a, "f0"_a, "n_harmonics"_a = 20, "discard"_a = py::none());

  m.def(
      "hysteresis",
      [](double frequency, double amplitude, int cycles, int steps_per_cycle) {
        analysis::HysteresisOptions o;
        o.steps_per_cycle = steps_per_cycle;
        analysis::HysteresisTrace tr;
        {
          py::gil_scoped_release release;
          tr = analysis::hysteresis_trace({}, devices::SourceSpec::sine(0.0, amplitude, frequency), cycles, o);
        }
        return py::dict("t"_a = tr.t, "v"_a = tr.v, "i"_a = tr.i, "loop_area"_a = tr.loop_area,
                        "peak_current"_a = tr.peak_current, "line_deviation"_a = tr.line_deviation);
      },
      "frequency"_a = 1.0, "amplitude"_a = 1.0, "cycles"_a = 2, "steps_per_cycle"_a = 2000);

  m.def(
      "table1",
      [](int jobs) {
        analysis::Table1Options o;
        o.jobs = jobs;
        analysis::AnalysisReport report;
        {
          py::gil_scoped_release release;
          report = analysis::table1_report(o);
        }
        py::list rows;
        for (const auto& r : report.rows) rows.append(report_row(r));
        return py::dict("rows"_a = rows, "notes"_a = report.notes);
      },
      "jobs"_a = 1);

  m.def(
      "calibrate",
      [](double target, double vdd, double tolerance) {
        analysis::CalibrationOptions o;
        o.target_time = target;
        o.vdd = vdd;
        o.tolerance = tolerance;
        analysis::CalibrationResult r;
        {
          py::gil_scoped_release release;
          r = analysis::calibrate_mobility({}, o);
        }
        return py::dict("mobility"_a = r.mobility, "switching_time"_a = r.switching_time,
                        "iterations"_a = r.iterations);
      },
      "target"_a = 1.4, "vdd"_a = 2.5, "tolerance"_a = 0.01);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = cli::run_cli(args, out, err, {});
        return py::make_tuple(code, out.str(), err.str());
      },
      "args"_a, "Runs the command-line front end in-process; returns (exit_code, stdout, stderr).");
}
