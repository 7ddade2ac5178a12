import math

import pytest

import mirrorsim


DIVIDER = """* divider
V1 in 0 DC 10
R1 in out 1k
R2 out 0 3k
.end
"""


def test_divider_operating_point():
    c = mirrorsim.Circuit(DIVIDER)
    op = c.operating_point()
    assert op["voltages"]["out"] == pytest.approx(7.5, rel=1e-9)
    assert op["currents"]["R1"] == pytest.approx(2.5e-3, rel=1e-9)


def test_parse_error_is_raised():
    with pytest.raises(mirrorsim.ParseError):
        mirrorsim.Circuit("* t\nR1 a\n")


def test_mirror_copies_current():
    text = mirrorsim.mirror_netlist(mirrorsim.MirrorKind.TWO_RESISTORS)
    op = mirrorsim.Circuit(text).operating_point()
    i_in, i_out = op["currents"]["M1"], op["currents"]["M2"]
    assert abs(i_out - i_in) < 1e-3 * i_in
    assert mirrorsim.Circuit(text).netlist() == text


def test_transient_probes():
    text = mirrorsim.mirror_netlist(mirrorsim.MirrorKind.TWO_MEMRISTORS)
    w = mirrorsim.Circuit(text).transient(0.01, 1e-3, ["r(Y2)"])
    assert len(w["time"]) == 11
    assert w["r(Y2)"][0] == pytest.approx(5e3)


def test_thd_of_sine():
    n = 200
    t = [k / n for k in range(5 * n + 1)]
    v = [math.sin(2 * math.pi * x) + 0.1 * math.sin(4 * math.pi * x) for x in t]
    r = mirrorsim.compute_thd(t, v, 1.0, 10)
    assert r["thd"] == pytest.approx(0.1, rel=1e-9)


def test_device_formulas():
    assert mirrorsim.thermal_voltage(300.0) == pytest.approx(0.0258519997864355, rel=1e-12)
    assert mirrorsim.memristance(0.0) == pytest.approx(38e3)
    assert mirrorsim.subthreshold_leakage(0.3, 1.0) > 0.0
    assert mirrorsim.gate_leakage(1.0) > 0.0


def test_hysteresis_pinches():
    h = mirrorsim.hysteresis(frequency=1.0, steps_per_cycle=500)
    assert h["loop_area"] > 0.0
    assert len(h["t"]) == len(h["i"])


def test_cli_in_process():
    code, out, err = mirrorsim.run_cli(["mirror", "2r"])
    assert code == 0
    assert "(A)" in out
    code, _, _ = mirrorsim.run_cli(["mirror", "nope"])
    assert code == 1
