"""Hybrid memristor-CMOS ratioed-logic (MRL) circuit simulator and verifier.

Submodules:
    devices  -- behavioral memristor / switch-level MOSFET models
    netlist  -- SPICE-like grammar, parser, flattening, validation
    gates    -- MRL block generators (gates, latch, DFF, XAX) and census
    engine   -- fixed-step transient nodal-analysis engine
    measure  -- digitization, slew/delay, energy, CSV/VCD export
    golden   -- cycle-accurate behavioral oracle
    verify   -- analog-vs-oracle equivalence checking
    report   -- device-count / area / performance comparison report
"""

from mrlsim.devices import (
    MemristorParams,
    MemristorState,
    MosfetParams,
    memristance,
    memristor_current,
    mosfet_conductance,
    state_derivative,
)
from mrlsim.engine import SimOptions, Waveform, run_transient, solve_step
from mrlsim.gates import DeviceCensus, XaxWiring, area_report
from mrlsim.golden import XaxState, eval_gate, step_dff, step_xax
from mrlsim.netlist import Circuit, FlatCircuit, NetlistError, expand, parse, validate

__version__ = "0.1.0"
