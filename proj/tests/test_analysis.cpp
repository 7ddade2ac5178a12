#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "mirrorsim/analysis.hpp"
#include "mirrorsim/error.hpp"

using namespace mirrorsim;
using namespace mirrorsim::analysis;
using netlist::MirrorKind;

namespace {

Waveform sampled(double f0, int per_period, int periods, const std::function<double(double)>& fn,
                 double t_offset = 0.0) {
  Waveform w{"x", "V", {}, {}};
  const double dt = 1.0 / (f0 * per_period);
  for (int k = 0; k <= per_period * periods; ++k) {
    const double t = t_offset + k * dt;
    w.t.push_back(t);
    w.values.push_back(fn(t));
  }
  return w;
}

// Fourier series of a unit square wave: b_n = 4/(n pi) for odd n, so V_n/V_1 = 1/n.
double square_thd_oracle(int n_max) {
  double s = 0.0;
  for (int n = 3; n <= n_max; n += 2) s += 1.0 / (static_cast<double>(n) * n);
  return std::sqrt(s);
}

MirrorSetup setup_for(MirrorKind kind) {
  MirrorSetup s;
  s.config.kind = kind;
  if (netlist::uses_pmos(kind)) s.config.vbias = 0.7;
  return s;
}

}  // namespace

TEST_CASE("thd of a pure sine") {
  const auto w = sampled(50.0, 200, 10, [](double t) { return 2.5 * std::sin(2 * M_PI * 50 * t); });
  const auto r = compute_thd(w, 50.0, 20);
  CHECK(r.thd < 1e-6);
  CHECK(r.fundamental == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("thd with a single known harmonic") {
  const auto w = sampled(50.0, 200, 10, [](double t) {
    return std::sin(2 * M_PI * 50 * t) + 0.1 * std::sin(2 * M_PI * 100 * t + 0.3);
  });
  const auto r = compute_thd(w, 50.0, 10);
  CHECK(r.thd == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(thd_from_magnitudes(1.0, std::vector<double>{0.1}) == 0.1);
}

TEST_CASE("thd of a square wave against the Fourier oracle") {
  // Half-sample offset keeps samples off the discontinuities.
  const int n = 10000;
  const double f0 = 1.0;
  auto square = [](double t) { return std::sin(2 * M_PI * t) >= 0.0 ? 1.0 : -1.0; };
  const auto w = sampled(f0, n, 4, square, 0.5 / n);
  const auto r49 = compute_thd(w, f0, 49);
  CHECK(r49.thd == doctest::Approx(square_thd_oracle(49)).epsilon(1e-3));
  CHECK(square_thd_oracle(49) == doctest::Approx(0.472973).epsilon(1e-5));
  const auto r999 = compute_thd(w, f0, 999);
  CHECK(std::abs(r999.percent() - 48.34) < 0.5);
  CHECK(std::sqrt(M_PI * M_PI / 8.0 - 1.0) == doctest::Approx(0.48342).epsilon(1e-4));
}

TEST_CASE("thd is scale invariant and self-consistent") {
  auto fn = [](double t) { return std::sin(2 * M_PI * 50 * t) + 0.05 * std::sin(6 * M_PI * 50 * t); };
  const auto a = compute_thd(sampled(50.0, 400, 8, fn), 50.0, 20);
  const auto b = compute_thd(sampled(50.0, 400, 8, [&](double t) { return 1e-5 * fn(t); }), 50.0, 20);
  CHECK(a.thd == doctest::Approx(b.thd).epsilon(1e-9));
  CHECK(std::abs(thd_from_magnitudes(a.fundamental, a.harmonics) - a.thd) <= 1e-12 * a.thd);
  CHECK(a.thd >= 0.0);
  CHECK(a.harmonics.size() == 19);
}

TEST_CASE("thd input validation") {
  auto sine = [](double t) { return std::sin(2 * M_PI * 50 * t); };
  CHECK_THROWS_AS(compute_thd(sampled(50.0, 100, 2, sine), 50.0, 5), Error);  // too short after discard
  CHECK_THROWS_AS(compute_thd(sampled(50.0, 10, 20, sine), 50.0, 3), Error);  // < 20 samples/period
  CHECK_THROWS_AS(compute_thd(sampled(50.0, 100, 20, sine), 47.0, 3), Error); // not on the grid
  CHECK_THROWS_AS(compute_thd(sampled(50.0, 40, 20, sine), 50.0, 20), Error); // above Nyquist
  CHECK_NOTHROW(compute_thd(sampled(50.0, 100, 3, sine), 50.0, 5, 0.0));
}

TEST_CASE("default settle discard") {
  const auto w = sampled(50.0, 100, 50, [](double) { return 0.0; });
  CHECK(default_thd_discard(w, 50.0) == doctest::Approx(0.2));
  const auto s = sampled(50.0, 100, 5, [](double) { return 0.0; });
  CHECK(default_thd_discard(s, 50.0) == doctest::Approx(0.04));
}

TEST_CASE("switching time") {
  const auto flat = sampled(1.0, 100, 1, [](double) { return 3.0; });
  CHECK(switching_time(flat) == 0.0);
  auto decay = sampled(1.0, 1000, 5, [](double t) { return 1.0 + 10.0 * std::exp(-t / 0.2); });
  // 10 exp(-t/0.2) <= 0.01 * 1 -> t >= 0.2 ln 1000
  CHECK(switching_time(decay) == doctest::Approx(0.2 * std::log(1000.0)).epsilon(2e-3));
  const double before = switching_time(decay);
  for (int k = 1; k <= 500; ++k) {
    decay.t.push_back(decay.t.back() + 1e-3);
    decay.values.push_back(decay.values.back());
  }
  CHECK(switching_time(decay) == before);
  const auto ramp = sampled(1.0, 100, 1, [](double t) { return t; });
  CHECK_THROWS_AS(switching_time(ramp), NotSettled);
}

TEST_CASE("mirror setup paths") {
  auto s = setup_for(MirrorKind::TwoResistors);
  s.set("T2.width", 0.54e-6);
  s.set("R2.value", 40e3);
  s.set("source.vdd", 3.0);
  const auto c = s.circuit();
  CHECK(c.mosfets[1].params.width == doctest::Approx(0.54e-6));
  CHECK(c.resistors[1].params.r_nominal == 40e3);
  CHECK(c.sources[0].spec.dc_value == 3.0);
  CHECK_THROWS_AS(s.set("source.vbias", 0.7), LookupError);
  CHECK_THROWS_AS(s.set("T9.width", 1.0), LookupError);
  CHECK_THROWS_AS(s.set("T2.colour", 1.0), LookupError);
  CHECK_THROWS_AS(s.set("nonsense", 1.0), LookupError);
  auto p = setup_for(MirrorKind::PmosMemristor);
  p.set("source.vbias", 0.8);
  p.set("TP.vth0", 0.5);
  p.set("Y2.r_off", 30e3);
  const auto pc = p.circuit();
  CHECK(pc.sources[1].spec.dc_value == 0.8);
  CHECK(pc.mosfets[0].params.vth0 == 0.5);
  CHECK(pc.memristors[0].params.r_off == 30e3);
  CHECK_FALSE(known_parameter_paths(MirrorKind::PmosMemristor).empty());
}

TEST_CASE("mismatch sweep baseline and resistor/memristor agreement") {
  const std::vector<double> loads = {30.4e3, 34.2e3, 38e3, 41.8e3, 45.6e3};
  const auto r = mismatch_sweep(setup_for(MirrorKind::TwoResistors), loads, {});
  const auto m = mismatch_sweep(setup_for(MirrorKind::TwoMemristors), loads, {});
  REQUIRE(r.rows.size() == loads.size());
  CHECK(std::abs(r.rows[2].simulated) < 1e-9);
  CHECK(r.rows[2].predicted == 0.0);
  CHECK(r.k > 1.0);
  for (std::size_t i = 0; i < loads.size(); ++i) {
    CHECK(r.rows[i].error.empty());
    CHECK(m.rows[i].error.empty());
    if (i != 2) CHECK(std::abs(m.rows[i].simulated - r.rows[i].simulated) <= 0.01 * std::abs(r.rows[i].simulated));
  }
  // Smaller output load -> more output current, same sign as the prediction.
  CHECK(r.rows[0].simulated > 0.0);
  CHECK(r.rows[4].simulated < 0.0);
  CHECK_THROWS_AS(mismatch_sweep(setup_for(MirrorKind::PmosResistor), loads, {}), Error);
}

TEST_CASE("temperature sweep") {
  std::vector<double> temps;
  for (int c = 0; c <= 100; c += 25) temps.push_back(constants::celsius_to_kelvin(c));
  const auto r = temperature_sweep(setup_for(MirrorKind::TwoResistors), temps, {});
  const auto m = temperature_sweep(setup_for(MirrorKind::TwoMemristors), temps, {});
  for (const auto* rows : {&r, &m}) {
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const auto& row = (*rows)[i];
      CHECK(row.error.empty());
      CHECK(std::abs(row.i_out - row.i_in) <= 1e-3 * row.i_in);
      if (i) CHECK(row.i_out < (*rows)[i - 1].i_out);
    }
  }
  const double var_r = (r.front().i_out - r.back().i_out) / r.front().i_out;
  const double var_m = (m.front().i_out - m.back().i_out) / m.front().i_out;
  CHECK(var_m < var_r);
  CHECK_THROWS_AS(temperature_sweep(setup_for(MirrorKind::TwoResistors), std::vector<double>{-1.0}, {}), Error);
}

TEST_CASE("parameter sweeps are monotonic") {
  const auto widths = parameter_sweep(setup_for(MirrorKind::TwoResistors), "T2.width",
                                      std::vector<double>{0.2e-6, 0.27e-6, 0.4e-6, 0.6e-6}, {});
  for (std::size_t i = 1; i < widths.size(); ++i) CHECK(widths[i].i_out > widths[i - 1].i_out);
  const auto vth = parameter_sweep(setup_for(MirrorKind::TwoResistors), "T2.vth0",
                                   std::vector<double>{0.40, 0.45, 0.50, 0.55}, {});
  for (std::size_t i = 1; i < vth.size(); ++i) CHECK(vth[i].i_out < vth[i - 1].i_out);
  CHECK_THROWS_AS(parameter_sweep(setup_for(MirrorKind::TwoResistors), "T2.nothing", std::vector<double>{1.0}, {}),
                  LookupError);
  const auto bad = parameter_sweep(setup_for(MirrorKind::TwoResistors), "T2.width", std::vector<double>{-1.0}, {});
  CHECK_FALSE(bad.front().error.empty());
}

TEST_CASE("PMOS memristor mirror at 2 V / 0.7 V bias settles just under 40 uA") {
  auto s = setup_for(MirrorKind::PmosMemristor);
  s.set("vdd", 2.0);
  s.set("vbias", 0.7);
  const auto p = settle(s.circuit(), {});
  const double i_out = p.op.current(p.circuit, "M2");
  CHECK(i_out > 30e-6);
  CHECK(i_out < 40e-6);
}

TEST_CASE("hysteresis loop") {
  const devices::MemristorParams params;
  HysteresisOptions o;
  o.steps_per_cycle = 1000;
  const auto t1 = hysteresis_trace(params, devices::SourceSpec::sine(0, 1, 1), 2, o);
  const auto t2 = hysteresis_trace(params, devices::SourceSpec::sine(0, 1, 2), 2, o);
  CHECK(t1.loop_area > t2.loop_area);
  CHECK(t2.loop_area > 0.0);
  for (std::size_t k = 0; k < t1.v.size(); ++k) {
    if (std::abs(t1.v[k]) < 1e-6) CHECK(std::abs(t1.i[k]) < 1e-9);
  }
  o.substitute_resistor = 19e3;
  const auto r = hysteresis_trace(params, devices::SourceSpec::sine(0, 1, 1), 2, o);
  CHECK(r.loop_area <= 1e-12 * t1.loop_area);
  CHECK(r.line_deviation < 1e-9);
  CHECK_THROWS_AS(hysteresis_trace(params, devices::SourceSpec::dc(1.0), 1, {}), Error);
}

TEST_CASE("loop area helpers") {
  // Unit square traversed once, split across v = 0.
  const std::vector<double> v = {0.0, 1.0, 1.0, 0.0};
  const std::vector<double> i = {0.0, 0.0, 1.0, 1.0};
  CHECK(pinched_loop_area(v, i) == doctest::Approx(1.0));
  // Figure eight: lobes of opposite orientation still add.
  const std::vector<double> v8 = {0.5, 1.0, 0.5, -0.5, -1.0, -0.5};
  const std::vector<double> i8 = {0.0, 1.0, 1.0, 0.0, -1.0, -1.0};
  CHECK(pinched_loop_area(v8, i8) == doctest::Approx(2.0 * 0.25));
  const std::vector<double> line_v = {-1, 0, 1, 2};
  const std::vector<double> line_i = {-2, 0, 2, 4};
  CHECK(max_line_deviation(line_v, line_i) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("power and area") {
  const auto r = table1_row(MirrorKind::TwoResistors, {});
  const auto m = table1_row(MirrorKind::TwoMemristors, {});
  REQUIRE(r.status == "ok");
  REQUIRE(m.status == "ok");
  CHECK(std::abs(r.power_mw - m.power_mw) < 0.01 * std::min(r.power_mw, m.power_mw));
  CHECK(m.area_um2 < 0.5 * r.area_um2);
  CHECK(r.area_um2 == doctest::Approx(2 * 20.0 + 2 * 0.0486));
  CHECK(m.area_um2 == doctest::Approx(2 * 0.00405 + 2 * 0.0486));
  CHECK(m.thd_percent <= r.thd_percent * (1.0 + 1e-9));
  for (const auto* row : {&r, &m}) {
    CHECK(row->thd_percent > 0.5);
    CHECK(row->thd_percent < 5.0);
    CHECK(row->power_mw * 1e-3 ==
          doctest::Approx(row->vdd * (row->i_in + row->i_out) + row->subthreshold_power + row->gate_power));
  }
}

TEST_CASE("zero-current operating point dissipates only leakage") {
  auto s = setup_for(MirrorKind::TwoResistors);
  s.set("vdd", 0.3);  // below threshold: square-law current is zero
  const auto c = s.circuit();
  const auto op = engine::solve_dc(c, {});
  const auto row = power_and_area(c, op, MirrorKind::TwoResistors, 0.3, {});
  CHECK(row.i_in == 0.0);
  CHECK(row.i_out == 0.0);
  CHECK(row.subthreshold_power > 0.0);
  CHECK(row.power_mw * 1e-3 == doctest::Approx(row.subthreshold_power + row.gate_power).epsilon(1e-15));
}

TEST_CASE("table1 report covers all configurations") {
  Table1Options o;
  o.jobs = 2;
  const auto report = table1_report(o);
  REQUIRE(report.rows.size() == 4);
  CHECK(report.rows[0].kind == MirrorKind::TwoResistors);
  CHECK(report.rows[3].kind == MirrorKind::PmosMemristor);
  CHECK(report.rows[2].area_um2 > report.rows[3].area_um2);
  CHECK(report.notes.size() == 5);
  const auto table = to_table(report);
  CHECK(table.rows.size() == 4);
  CHECK(table.header[1] == "thd (%)");
}

TEST_CASE("sweeps are deterministic across job counts") {
  std::vector<double> temps;
  for (int c = 0; c <= 100; c += 10) temps.push_back(constants::celsius_to_kelvin(c));
  const auto a = to_csv(to_table(temperature_sweep(setup_for(MirrorKind::TwoMemristors), temps, {}, 1)));
  const auto b = to_csv(to_table(temperature_sweep(setup_for(MirrorKind::TwoMemristors), temps, {}, 4)));
  CHECK(a == b);
  const std::vector<double> loads = {30e3, 35e3, 38e3, 42e3};
  const auto c = to_csv(to_table(mismatch_sweep(setup_for(MirrorKind::TwoResistors), loads, {}, 1)));
  const auto d = to_csv(to_table(mismatch_sweep(setup_for(MirrorKind::TwoResistors), loads, {}, 3)));
  CHECK(c == d);
}

TEST_CASE("csv formatting") {
  CsvTable t;
  t.header = {csv_column("time", "s"), csv_column("label", "")};
  t.rows.push_back({1.0 / 3.0, std::string("a,b")});
  t.rows.push_back({-0.0, std::string("plain")});
  CHECK(to_csv(t) == "time (s),label\n0.333333333,\"a,b\"\n0,plain\n");
  CHECK(csv_number(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("calibration input validation") {
  netlist::MirrorConfig cfg;
  CalibrationOptions o;
  o.target_time = 0.0;
  CHECK_THROWS_AS(calibrate_mobility(cfg, o), Error);
  o.target_time = 1e-5;  // shorter than dt = 6e-4
  CHECK_THROWS_AS(calibrate_mobility(cfg, o), CalibrationError);
}
