#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "mirrorsim/engine.hpp"
#include "mirrorsim/error.hpp"
#include "mirrorsim/netlist.hpp"

using namespace mirrorsim;
using namespace mirrorsim::engine;

namespace {

netlist::Circuit circuit_from(const std::string& text) { return netlist::elaborate(netlist::parse(text)); }

netlist::Circuit mirror(netlist::MirrorKind kind) {
  netlist::MirrorConfig cfg;
  cfg.kind = kind;
  if (netlist::uses_pmos(kind)) cfg.vbias = 0.7;
  return netlist::elaborate(netlist::builtin_mirror(cfg));
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("divider matches the analytic solution") {
  const auto c = circuit_from("* d\nV1 in 0 DC 10\nR1 in out 1k\nR2 out 0 3k\n.end\n");
  const auto op = solve_dc(c, {});
  CHECK(rel_close(op.voltage(c, "out"), 7.5, 1e-9));
  CHECK(rel_close(op.current(c, "R1"), 2.5e-3, 1e-9));
  CHECK(rel_close(op.current(c, "V1"), -2.5e-3, 1e-9));
  CHECK(op.max_kcl_residual < 1e-9);
}

TEST_CASE("R-2R ladder halves at every node") {
  const auto c = circuit_from(R"(* ladder
V1 n0 0 8
R1 n0 n1 1k
R2 n1 0 2k
R3 n1 n2 1k
R4 n2 0 2k
R5 n2 n3 1k
R6 n3 0 2k
R7 n3 n4 1k
R8 n4 0 2k
R9 n4 0 2k
.end
)");
  const auto op = solve_dc(c, {});
  for (int k = 1; k <= 4; ++k) {
    CHECK(rel_close(op.voltage(c, "n" + std::to_string(k)), 8.0 / std::pow(2.0, k), 1e-9));
  }
}

TEST_CASE("two sources by nodal superposition") {
  const auto c = circuit_from("* s\nV1 a 0 5\nV2 b 0 3\nR1 a c 1k\nR2 b c 2k\nR3 c 0 3k\n.end\n");
  const auto op = solve_dc(c, {});
  const double expected = (5.0 / 1e3 + 3.0 / 2e3) / (1.0 / 1e3 + 1.0 / 2e3 + 1.0 / 3e3);
  CHECK(rel_close(op.voltage(c, "c"), expected, 1e-9));
}

TEST_CASE("two-resistor mirror matches a bisection oracle") {
  const auto c = mirror(netlist::MirrorKind::TwoResistors);
  const auto op = solve_dc(c, {});
  // Root of (2.5 - v)/38k = beta/2 (v - 0.45)^2 (1 + 0.05 v), mpmath bisection.
  CHECK(rel_close(op.voltage(c, "d1"), 0.994140744252859, 1e-7));
  CHECK(rel_close(op.current(c, "R1"), 3.96278751512405e-5, 1e-7));
  CHECK(rel_close(op.current(c, "M2"), op.current(c, "M1"), 1e-9));
}

TEST_CASE("KCL holds at every mirror operating point") {
  for (auto kind : {netlist::MirrorKind::TwoResistors, netlist::MirrorKind::TwoMemristors,
                    netlist::MirrorKind::PmosResistor, netlist::MirrorKind::PmosMemristor}) {
    const auto c = mirror(kind);
    const auto op = solve_dc(c, {});
    CHECK(op.max_kcl_residual < 1e-9);
    const auto states = c.initial_states();
    for (double r : kcl_residuals(c, op, states, {})) CHECK(std::abs(r) < 1e-9);
  }
}

TEST_CASE("pathological circuit reports non-convergence with a trace") {
  const auto c = circuit_from("* bad\n.model N NMOS\nV1 a 0 1000\nR1 a d 1k\nM1 d 0 0 0 N\n.end\n");
  try {
    (void)solve_dc(c, {});
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK_FALSE(e.trace().empty());
    CHECK(e.time() == -1.0);
  }
}

TEST_CASE("parallel voltage sources are singular") {
  const auto c = circuit_from("* s\nV1 a 0 1\nV2 a 0 2\nR1 a 0 1k\n.end\n");
  CHECK_THROWS_AS(solve_dc(c, {}), SingularMatrix);
}

TEST_CASE("tolerance validation") {
  SimOptions o;
  o.reltol = -1.0;
  CHECK_THROWS_AS(o.validate_tolerances(), Error);
  o = {};
  o.t_stop = 1.0;
  o.dt = 2.0;
  CHECK_THROWS_AS(o.validate_transient(), Error);
  o.dt = 0.0;
  CHECK(o.validate_transient() == doctest::Approx(1e-4));
}

TEST_CASE("transient of a linear circuit follows the source") {
  const auto c = circuit_from("* t\nV1 in 0 SIN(1 2 50)\nR1 in out 1k\nR2 out 0 3k\n.end\n");
  SimOptions o;
  o.t_stop = 0.04;
  o.dt = 1e-4;
  const std::vector<std::string> probes = {"v(out)"};
  const auto w = run_transient(c, o, probes).front();
  REQUIRE(w.t.size() == 401);
  for (std::size_t k = 0; k < w.t.size(); ++k) {
    const double src = 1.0 + 2.0 * std::sin(2.0 * M_PI * 50.0 * w.t[k]);
    CHECK(std::abs(w.values[k] - 0.75 * src) < 1e-9);
  }
}

TEST_CASE("pinned memristors reproduce the resistor circuit") {
  // Start both memristors at Roff: the supply current pushes them further
  // toward Roff, so they stay clamped there.
  auto mem = mirror(netlist::MirrorKind::TwoMemristors);
  for (auto& m : mem.memristors) m.initial.w = 0.0;
  const auto res = mirror(netlist::MirrorKind::TwoResistors);
  SimOptions o;
  o.t_stop = 0.2;
  o.dt = 1e-3;
  const std::vector<std::string> probes = {"i(M2)", "v(d1)"};
  const auto a = run_transient(mem, o, probes);
  const auto b = run_transient(res, o, probes);
  for (std::size_t k = 0; k < a[0].values.size(); ++k) {
    CHECK(rel_close(a[0].values[k], b[0].values[k], 1e-12));
    CHECK(rel_close(a[1].values[k], b[1].values[k], 1e-12));
  }
}

TEST_CASE("memristor switching raises resistance toward Roff") {
  const auto c = mirror(netlist::MirrorKind::TwoMemristors);
  SimOptions o;
  o.t_stop = 3.0;
  o.dt = 1e-3;
  const std::vector<std::string> probes = {"r(Y2)", "i(M2)"};
  const auto w = run_transient(c, o, probes);
  CHECK(w[0].values.front() == doctest::Approx(5e3));
  CHECK(w[0].values.back() == doctest::Approx(38e3));
  for (std::size_t k = 1; k < w[0].values.size(); ++k) CHECK(w[0].values[k] >= w[0].values[k - 1]);
  CHECK(w[1].values.front() > 4.0 * w[1].values.back());
}

TEST_CASE("step halving changes a mid-switch state by less than 0.1%") {
  const auto c = mirror(netlist::MirrorKind::TwoMemristors);
  SimOptions o;
  o.t_stop = 0.7;
  o.dt = 1e-3;
  const auto coarse = simulate_transient(c, o, {});
  o.dt = 5e-4;
  const auto fine = simulate_transient(c, o, {});
  for (std::size_t k = 0; k < coarse.final_states.size(); ++k) {
    const double wc = coarse.final_states[k].w, wf = fine.final_states[k].w;
    REQUIRE(wf > 0.0);
    CHECK(std::abs(wc - wf) / wf < 1e-3);
  }
}

TEST_CASE("state change equals drift times delivered charge") {
  const auto c = circuit_from(R"(* charge
.model MM MEM r_on=100 r_off=38k length=10n window_exponent=0
V1 a 0 SIN(0 1 1)
Y1 a 0 MM w0=5n
.end
)");
  SimOptions o;
  o.t_stop = 0.5;  // positive half cycle
  o.dt = 1e-4;
  const std::vector<std::string> probes = {"i(Y1)", "w(Y1)"};
  const auto w = run_transient(c, o, probes);
  double charge = 0.0;
  for (std::size_t k = 1; k < w[0].t.size(); ++k) {
    charge += 0.5 * (w[0].values[k] + w[0].values[k - 1]) * (w[0].t[k] - w[0].t[k - 1]);
  }
  const auto& p = c.memristors[0].params;
  const double expected = p.mobility * p.r_on / p.length * charge;
  const double moved = w[1].values.back() - w[1].values.front();
  CHECK(moved > 0.0);
  CHECK(std::abs(moved - expected) / expected < 1e-3);
}

TEST_CASE("probes") {
  const auto c = mirror(netlist::MirrorKind::TwoMemristors);
  SimOptions o;
  o.t_stop = 1e-3;
  o.dt = 1e-4;
  const std::vector<std::string> bad = {"x(d1)"};
  CHECK_THROWS_AS(run_transient(c, o, bad), LookupError);
  const std::vector<std::string> missing = {"v(nowhere)"};
  CHECK_THROWS_AS(run_transient(c, o, missing), LookupError);
  const auto probes = default_probes(c);
  const auto w = run_transient(c, o, probes);
  CHECK(w.size() == probes.size());
  CHECK(w.front().unit == "V");
}
