#include <cmath>
#include <string>

#include "doctest.h"
#include "mirrorsim/error.hpp"
#include "mirrorsim/netlist.hpp"

using namespace mirrorsim;
using namespace mirrorsim::netlist;

namespace {

constexpr const char* kDivider = R"(* resistive divider
V1 in 0 DC 10
R1 in out 1k
R2 out 0 3k ; bottom leg
.end
)";

int error_line(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

std::string elaboration_error(const std::string& text) {
  try {
    (void)elaborate(parse(text));
  } catch (const ElaborationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("numbers with scale suffixes") {
  CHECK(parse_number("1k") == 1e3);
  CHECK(parse_number("38K") == 38e3);
  CHECK(parse_number("1meg") == 1e6);
  CHECK(parse_number("2.5v") == 2.5);
  CHECK(parse_number("10u") == doctest::Approx(10e-6));
  CHECK(parse_number("4n") == doctest::Approx(4e-9));
  CHECK(parse_number("1e-3") == 1e-3);
  CHECK(parse_number("-0.5m") == doctest::Approx(-0.5e-3));
  CHECK(parse_number("3kohm") == 3e3);
  CHECK_FALSE(parse_number("abc"));
  CHECK_FALSE(parse_number("1.2.3"));
  CHECK_FALSE(parse_number("5k7"));
}

TEST_CASE("format_number round-trips") {
  for (double v : {0.0, 1.0, 100.0, 38000.0, 1e-8, 2.73281511045e-31, 0.1, 1.0 / 3.0, -2.5, 9.538765834528231e-15}) {
    const auto s = format_number(v);
    CHECK(parse_number(s) == v);
  }
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(1e-8) == "1e-8");
  CHECK(format_number(38000.0) == "38000");
}

TEST_CASE("parse a divider") {
  const auto ast = parse(kDivider);
  CHECK(ast.title == "resistive divider");
  REQUIRE(ast.cards.size() == 4);
  const auto& r2 = std::get<ElementCard>(ast.cards[2]);
  CHECK(r2.name == "R2");
  CHECK(r2.nodes == std::vector<std::string>{"out", "0"});
  CHECK(std::get<double>(r2.args[0]) == 3e3);
  CHECK(r2.line == 4);
}

TEST_CASE("continuation lines, comments and case") {
  const auto ast = parse("* t\n* just a comment\nv1 IN 0\n+ dc 5\nR1 in 0\n+ 1k\n.END\nignored after end\n");
  REQUIRE(ast.cards.size() == 3);
  const auto c = elaborate(ast);
  CHECK(c.sources.at(0).spec.dc_value == 5.0);
  CHECK(c.find_node("IN").has_value());
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("* t\nV1 a 0 1\nR1 a\n.end\n") == 3);
  CHECK(error_line("* t\nV1 a 0 1\nR1 a 0 1k\nQ1 a b c\n") == 4);
  CHECK(error_line("* t\nV1 a 0 SIN(0 1 50\n") == 2);
  CHECK(error_line("* t\n.bogus 1 2\n") == 2);
  CHECK(error_line("* t\nR1 a 0 1x2\n") == 2);
  CHECK(error_line("* t\nR1 a 0 1k\nr1 b 0 1k\n") == 3);
  CHECK(error_line("+ 1k\n") == 1);
  CHECK(error_line("* t\nR1 a 0 1k $\n") == 2);
  CHECK(error_line("* t\n.tran 1m\n") == 2);
}

TEST_CASE("error message names the card") {
  try {
    (void)parse("* t\nR7 a\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("R7") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("print/parse round trip on built-in mirrors") {
  for (auto kind : {MirrorKind::TwoResistors, MirrorKind::TwoMemristors, MirrorKind::PmosResistor,
                    MirrorKind::PmosMemristor}) {
    MirrorConfig cfg;
    cfg.kind = kind;
    if (uses_pmos(kind)) cfg.vbias = 0.7;
    const auto ast = builtin_mirror(cfg);
    const auto text = print(ast);
    const auto again = parse(text);
    CHECK(structurally_equal(ast, again));
    CHECK(print(again) == text);
  }
}

TEST_CASE("round trip keeps calls, params and directives") {
  const std::string text = R"(* everything
.param rl=38k
.model N1 NMOS vth0=0.5 kp=200u
.model MM MEM r_on=100 r_off=16k
V1 a 0 SIN(2 1 50 0.5)
R1 a b {rl} tc=0
Y1 b c MM m0=5k
M1 c c 0 0 N1 width=1u
.tran 1m 10m
.temp 27
.end
)";
  const auto ast = parse(text);
  CHECK(structurally_equal(ast, parse(print(ast))));
}

TEST_CASE("elaborate a mirror") {
  MirrorConfig cfg;
  cfg.kind = MirrorKind::TwoMemristors;
  const auto c = elaborate(builtin_mirror(cfg));
  CHECK(c.memristors.size() == 2);
  CHECK(c.mosfets.size() == 2);
  CHECK(c.sources.size() == 1);
  CHECK(c.memristors[0].params.r_off == 38e3);
  CHECK(devices::memristance(c.memristors[0].initial, c.memristors[0].params) == doctest::Approx(5e3));
  CHECK(c.node_names.front() == "0");
}

TEST_CASE("elaboration: params, temp, models") {
  const auto c = elaborate(parse(
      "* t\n.param r=2k\n.model N NMOS vto=0.6 w=1u\nV1 a 0 1\nR1 a b {r}\nM1 b b 0 0 N l=0.5u\n.temp 50\n.end\n"));
  CHECK(c.resistors[0].params.r_nominal == 2e3);
  CHECK(c.mosfets[0].params.vth0 == 0.6);
  CHECK(c.mosfets[0].params.width == doctest::Approx(1e-6));
  CHECK(c.mosfets[0].params.length == doctest::Approx(0.5e-6));
  REQUIRE(c.temp);
  CHECK(*c.temp == doctest::Approx(323.15));
}

TEST_CASE("elaboration errors") {
  CHECK(elaboration_error("* t\nR1 a 0 1k\n").find("no sources") != std::string::npos);
  CHECK(elaboration_error("* t\nV1 a b 1\nR1 a b 1k\n").find("ground") != std::string::npos);
  CHECK(elaboration_error("* t\nV1 a 0 1\nR1 a 0 1k\nR2 x y 1k\n").find("node") != std::string::npos);
  CHECK(elaboration_error("* t\nV1 a 0 1\nM1 a a 0 0 NOPE\n").find("undefined model") != std::string::npos);
  CHECK(elaboration_error("* t\nV1 a 0 1\nR1 a 0 {nope}\n").find("undefined parameter") != std::string::npos);
  CHECK(elaboration_error("* t\n.model M MEM\nV1 a 0 1\nY1 a 0 M m0=1\n").find("outside") != std::string::npos);
  CHECK(elaboration_error("* t\n.model N NMOS bogus=1\nV1 a 0 1\nM1 a a 0 0 N\n").find("unknown") !=
        std::string::npos);
  CHECK(elaboration_error("* t\nV1 a 0 1\nR1 a 0 -5\n").find("positive") != std::string::npos);
}

TEST_CASE("mirror config validation") {
  MirrorConfig cfg;
  cfg.kind = MirrorKind::PmosResistor;
  CHECK_THROWS_AS(builtin_mirror(cfg), Error);
  cfg.kind = MirrorKind::TwoResistors;
  cfg.vbias = 0.7;
  CHECK_THROWS_AS(builtin_mirror(cfg), Error);
  cfg.vbias.reset();
  cfg.vdd = -1.0;
  CHECK_THROWS_AS(builtin_mirror(cfg), Error);
  cfg = {};
  cfg.kind = MirrorKind::TwoMemristors;
  cfg.m0 = 50.0;
  CHECK_THROWS_AS(builtin_mirror(cfg), Error);
}

TEST_CASE("short names") {
  CHECK(kind_from_short_name("2R") == MirrorKind::TwoResistors);
  CHECK(kind_from_short_name("pmos-m") == MirrorKind::PmosMemristor);
  CHECK_FALSE(kind_from_short_name("3r"));
  for (auto k : {MirrorKind::TwoResistors, MirrorKind::TwoMemristors, MirrorKind::PmosResistor,
                 MirrorKind::PmosMemristor}) {
    CHECK(kind_from_short_name(short_name(k)) == k);
  }
}
