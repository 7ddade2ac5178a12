"""Python bindings for the mirrorsim current-mirror simulator."""

from ._mirrorsim import (  # noqa: F401
    CalibrationError,
    Circuit,
    MirrorKind,
    MirrorsimError,
    NonConvergence,
    NotSettled,
    ParseError,
    calibrate,
    compute_thd,
    gate_leakage,
    hysteresis,
    memristance,
    mirror_netlist,
    run_cli,
    subthreshold_leakage,
    table1,
    thermal_voltage,
)

__version__ = "0.1.0"
