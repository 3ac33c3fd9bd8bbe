"""Generators for every MRL building block, plus device census and area.

Each builder returns a :class:`Block` whose ``text`` is plain netlist
subcircuit source (including any sub-blocks it depends on), so every
block is inspectable and independently simulable. Census numbers come
from traversing the parsed text, which keeps them additive by
construction.

Topologies: AND/OR are two-memristor dividers (bar terminals at the
output for AND, at the inputs for OR), NAND/NOR add a CMOS inverter,
XOR = (a OR b) AND NOT(a AND b) with an inverter-less final AND stage,
the D latch is a gated-SR structure (input inverter, two AND gates, two
cross-coupled NORs), the DFF is two latches on complementary clock
phases, and the XAX module is XOR-AND-XOR plus three DFFs.

The module datapath uses stage-graded copies of XOR and AND (identical
topology, dedicated models): r_on rises monotonically from the first
XOR through the registers, so in every cross-stage series fight the
intended loser carries the larger resistance share and programs off
first, even from a half-programmed state. Megohm bleed resistors tie
the three datapath nodes to ground so a node whose drivers have all
programmed off reads as 0 instead of floating on an off-resistance
divider; they are far above any driven impedance and, like the latch
RCs, do not enter the device census.

The latch NOR gates carry an RC at each inverter gate (10k/2fF, ~20 ps).
Switch-level inverters have zero gain at mid-level and memristor state
adapts in picoseconds, so a zero-delay feedback loop would latch input
glitches, while a loop much slower than the moderate-bias drift time
(~35 ps) lets the set/reset memristors program themselves off mid-flip;
~20 ps sits between the two. One gate cap starts at vdd so the latch
powers up with q low instead of at the (exactly stable) metastable
point. Neither R nor C enters the device census.

Every subcircuit carries a trailing ``vdd`` port: the grammar has no
global-supply card, so the supply is threaded explicitly.
"""

from dataclasses import dataclass, field

from mrlsim.netlist import Circuit, parse

MEMRISTOR_MODEL = "MRMOD"
NMOS_MODEL = "NMOD"
PMOS_MODEL = "PMOD"

DEFAULT_MODEL_DECK = """\
.model MRMOD memristor r_on=1k r_off=1meg v_char=0.25 window_exponent=1
.model MRMODL memristor r_on=1.8k r_off=1meg v_char=0.25 window_exponent=1
.model MRX1A memristor r_on=100 r_off=1meg v_char=0.25 window_exponent=1
.model MRX1B memristor r_on=180 r_off=1meg v_char=0.25 window_exponent=1
.model MRX2 memristor r_on=270 r_off=1meg v_char=0.25 window_exponent=1
.model MRX3A memristor r_on=560 r_off=1meg v_char=0.25 window_exponent=1
.model MRX3B memristor r_on=820 r_off=1meg v_char=0.25 window_exponent=1
.model NMOD nmos v_th=0.3 r_ds_on=100 r_ds_off=1g
.model PMOD pmos v_th=0.3 r_ds_on=100 r_ds_off=1g
"""

GATE_KINDS = ("and", "or", "nand", "nor", "not", "xor")
BLOCK_KINDS = GATE_KINDS + ("dlatch", "dff", "xax")


@dataclass(frozen=True)
class DeviceCensus:
    memristors: int = 0
    transistors: int = 0

    def __post_init__(self):
        if self.memristors < 0 or self.transistors < 0:
            raise ValueError("counts must be non-negative")

    @property
    def inverter_cells(self) -> int:
        """Transistor pairs; meaningful when all CMOS is inverter-structured."""
        return self.transistors // 2

    def __add__(self, other):
        return DeviceCensus(
            self.memristors + other.memristors,
            self.transistors + other.transistors,
        )


@dataclass(frozen=True)
class XaxWiring:
    """Which module stages carry a DFF; the default places all three."""

    x_stage: bool = True
    a_stage: bool = True
    acc_stage: bool = True

    @property
    def dff_count(self):
        return int(self.x_stage) + int(self.a_stage) + int(self.acc_stage)


@dataclass
class Block:
    name: str
    ports: tuple  # logical ports, then vdd
    text: str  # subcircuit definitions (dependencies included)
    census: DeviceCensus
    inputs: tuple = ()
    outputs: tuple = ()
    clocked: bool = False
    # Inputs that benefit from a brief drive-to-1 at the start of each
    # stimulus slot: a memristor facing a node that is already at the
    # level it would drive to passes no current, so its state cannot
    # recover there. Exercising the input high re-programs the pull-up
    # path of whatever gate it feeds before the slot's real level lands.
    conditioned_inputs: tuple = ()


_AND_BODY = """\
.subckt mrl_and a b y vdd
Y1 y a MRMOD
Y2 y b MRMOD
.ends
"""

_OR_BODY = """\
.subckt mrl_or a b y vdd
Y1 a y MRMOD
Y2 b y MRMOD
.ends
"""

_NOT_BODY = """\
.subckt mrl_not a y vdd
M1 y a vdd vdd PMOD
M2 y a 0 0 NMOD
.ends
"""

_NAND_BODY = """\
.subckt mrl_nand a b y vdd
Y1 w a MRMOD
Y2 w b MRMOD
M1 y w vdd vdd PMOD
M2 y w 0 0 NMOD
.ends
"""

_NOR_BODY = """\
.subckt mrl_nor a b y vdd
Y1 a w MRMOD
Y2 b w MRMOD
M1 y w vdd vdd PMOD
M2 y w 0 0 NMOD
.ends
"""

_XOR_BODY = """\
.subckt mrl_xor a b y vdd
Y1 a p MRMOD
Y2 b p MRMOD
Y3 w a MRMOD
Y4 w b MRMOD
M1 n w vdd vdd PMOD
M2 n w 0 0 NMOD
Y5 y p MRMOD
Y6 y n MRMOD
.ends
"""

_DLATCH_BODY = """\
.subckt mrl_dlatch d en q vdd
M1 db d vdd vdd PMOD
M2 db d 0 0 NMOD
Y1 s d MRMODL
Y2 s en MRMODL
Y3 r db MRMODL
Y4 r en MRMODL
Y5 r o1 MRMODL
Y6 qb o1 MRMODL
R1 o1 g1 10k
C1 g1 0 2f ic=1
M3 q g1 vdd vdd PMOD
M4 q g1 0 0 NMOD
Y7 s o2 MRMODL
Y8 q o2 MRMODL
R2 o2 g2 10k
C2 g2 0 2f
M5 qb g2 vdd vdd PMOD
M6 qb g2 0 0 NMOD
.ends
"""

_DFF_BODY = """\
.subckt mrl_dff d clk q vdd
M1 cb clk vdd vdd PMOD
M2 cb clk 0 0 NMOD
X1 d cb qm vdd mrl_dlatch
X2 qm clk q vdd mrl_dlatch
.ends
"""

_XOR_STAGE_TEMPLATE = """\
.subckt {name} a b y vdd
Y1 a p {m_or}
Y2 b p {m_or}
Y3 w a {m_or}
Y4 w b {m_or}
M1 n w vdd vdd PMOD
M2 n w 0 0 NMOD
Y5 y p {m_and}
Y6 y n {m_and}
.ends
"""

_AND_STAGE_TEMPLATE = """\
.subckt {name} a b y vdd
Y1 y a {m}
Y2 y b {m}
.ends
"""

# Stage-graded copies of the gates for the module datapath. Ratioed logic
# resolves every node fight by which memristor programs off first, and the
# loser is the device with the larger voltage drop, i.e. the larger
# resistance share of the series chain. Grading r_on monotonically from
# the first XOR up through the registers makes the intended loser of every
# cross-stage fight lose it even when its state starts half-programmed.
_XOR_IN_BODY = _XOR_STAGE_TEMPLATE.format(name="mrl_xor_in", m_or="MRX1A", m_and="MRX1B")
_AND_MID_BODY = _AND_STAGE_TEMPLATE.format(name="mrl_and_mid", m="MRX2")
_XOR_OUT_BODY = _XOR_STAGE_TEMPLATE.format(name="mrl_xor_out", m_or="MRX3A", m_and="MRX3B")

_GATE_BODIES = {
    "and": _AND_BODY,
    "or": _OR_BODY,
    "not": _NOT_BODY,
    "nand": _NAND_BODY,
    "nor": _NOR_BODY,
    "xor": _XOR_BODY,
}


def census(circuit: Circuit, subckt: str = None) -> DeviceCensus:
    """Count memristors and transistors by recursive traversal."""

    def count(body):
        total = DeviceCensus()
        for d in body.devices:
            if d.kind == "Y":
                total += DeviceCensus(memristors=1)
            elif d.kind == "M":
                total += DeviceCensus(transistors=1)
        for inst in body.instances:
            sub = circuit.subckt_defs.get(inst.subckt)
            if sub is None:
                raise KeyError(f"undefined subcircuit {inst.subckt!r}")
            total += count(sub.body)
        return total

    if subckt is None:
        return count(circuit)
    sub = circuit.subckt_defs.get(subckt)
    if sub is None:
        raise KeyError(f"undefined subcircuit {subckt!r}")
    return count(sub.body)


def _block_from_text(name, text, inputs, outputs, clocked=False,
                     conditioned_inputs=()):
    wrapped = f"* {name}\n{text}.end\n"
    parsed = parse(wrapped)
    ports = tuple(parsed.subckt_defs[name].ports)
    return Block(
        name=name,
        ports=ports,
        text=text,
        census=census(parsed, name),
        inputs=inputs,
        outputs=outputs,
        clocked=clocked,
        conditioned_inputs=conditioned_inputs,
    )


def build_gate(kind: str) -> Block:
    """Subcircuit for one basic MRL gate; kind in and/or/nand/nor/not/xor."""
    kind = kind.lower()
    if kind not in _GATE_BODIES:
        raise ValueError(f"unknown gate kind {kind!r}")
    inputs = ("a",) if kind == "not" else ("a", "b")
    return _block_from_text(f"mrl_{kind}", _GATE_BODIES[kind], inputs, ("y",))


def build_dlatch() -> Block:
    return _block_from_text("mrl_dlatch", _DLATCH_BODY, ("d", "en"), ("q",))


def build_dff() -> Block:
    text = _DLATCH_BODY + _DFF_BODY
    return _block_from_text("mrl_dff", text, ("d",), ("q",), clocked=True)


def build_xax(wiring: XaxWiring = XaxWiring()) -> Block:
    """The XOR-AND-XOR module with registered stages per ``wiring``."""
    if not isinstance(wiring, XaxWiring):
        raise ValueError("wiring must be an XaxWiring")
    lines = [".subckt mrl_xax x_in a_in s_in x_out acc_out clk vdd"]
    if wiring.x_stage:
        lines.append("X1 x_in clk x_out vdd mrl_dff")
        xr = "x_out"
    else:
        lines.append("R1 x_in x_out 1m")  # wire-through stand-in
        xr = "x_out"
    if wiring.a_stage:
        lines.append("X2 a_in clk ar vdd mrl_dff")
        ar = "ar"
    else:
        ar = "a_in"
    lines.append(f"X3 x_in {xr} t1 vdd mrl_xor_in")
    lines.append(f"X4 t1 {ar} t2 vdd mrl_and_mid")
    lines.append("X5 t2 s_in t3 vdd mrl_xor_out")
    if wiring.acc_stage:
        lines.append("X6 t3 clk acc_out vdd mrl_dff")
    else:
        lines.append("R2 t3 acc_out 1m")
    # Bleed resistors: a datapath node whose drivers have all programmed
    # off floats at whatever a residual off-resistance divider gives it,
    # which downstream stages read as a solid level. A megohm to ground
    # defines such nodes as 0 while dropping under a millivolt on a node
    # that is actually driven.
    lines.append("Rb1 t1 0 1meg")
    lines.append("Rb2 t2 0 1meg")
    lines.append("Rb3 t3 0 1meg")
    lines.append(".ends")
    text = (
        _DLATCH_BODY
        + _DFF_BODY
        + _XOR_IN_BODY
        + _AND_MID_BODY
        + _XOR_OUT_BODY
        + "\n".join(lines)
        + "\n"
    )
    return _block_from_text(
        "mrl_xax",
        text,
        ("x_in", "a_in", "s_in"),
        ("x_out", "acc_out"),
        clocked=True,
        conditioned_inputs=("x_in",),
    )


def build_block(kind: str) -> Block:
    kind = kind.lower()
    if kind in _GATE_BODIES:
        return build_gate(kind)
    if kind == "dlatch":
        return build_dlatch()
    if kind == "dff":
        return build_dff()
    if kind == "xax":
        return build_xax()
    raise ValueError(f"unknown block {kind!r}")


@dataclass(frozen=True)
class AreaReport:
    inverter_cells: int
    baseline_cells: int
    cell_area: float

    @property
    def mrl_area(self) -> float:
        """Memristors ride the upper layers, so only inverter cells count."""
        return self.inverter_cells * self.cell_area

    @property
    def baseline_area(self) -> float:
        return self.baseline_cells * self.cell_area

    @property
    def saving(self) -> float:
        return (self.baseline_cells - self.inverter_cells) / self.baseline_cells


def area_report(
    census_: DeviceCensus, baseline_cmos_cells: int, cell_area: float = 1.0
) -> AreaReport:
    if baseline_cmos_cells <= 0:
        raise ValueError("baseline cell count must be positive")
    return AreaReport(census_.inverter_cells, baseline_cmos_cells, cell_area)
