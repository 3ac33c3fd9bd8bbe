"""Cycle-accurate behavioral oracle for every generated block."""

from dataclasses import dataclass

_GATE_FUNCS = {
    "and": lambda a, b: a & b,
    "or": lambda a, b: a | b,
    "nand": lambda a, b: 1 - (a & b),
    "nor": lambda a, b: 1 - (a | b),
    "xor": lambda a, b: a ^ b,
}

GATE_ARITY = {"and": 2, "or": 2, "nand": 2, "nor": 2, "xor": 2, "not": 1}


def eval_gate(kind: str, inputs) -> int:
    kind = kind.lower()
    if kind not in GATE_ARITY:
        raise ValueError(f"unknown gate kind {kind!r}")
    inputs = tuple(int(b) for b in inputs)
    if any(b not in (0, 1) for b in inputs):
        raise ValueError("inputs must be bits")
    if len(inputs) != GATE_ARITY[kind]:
        raise ValueError(f"{kind} takes {GATE_ARITY[kind]} input(s)")
    if kind == "not":
        return 1 - inputs[0]
    return _GATE_FUNCS[kind](*inputs)


def step_dff(d: int, clk_edge: str, q: int) -> int:
    """q' = d on a rising edge, otherwise hold."""
    if clk_edge not in ("rising", "none"):
        raise ValueError("clk_edge must be 'rising' or 'none'")
    return int(d) if clk_edge == "rising" else int(q)


def step_dlatch(d: int, en: int, q: int) -> int:
    """Level-sensitive latch: transparent while en is high."""
    return int(d) if en else int(q)


@dataclass(frozen=True)
class XaxState:
    xr: int = 0
    ar: int = 0
    acc: int = 0

    def __post_init__(self):
        for b in (self.xr, self.ar, self.acc):
            if b not in (0, 1):
                raise ValueError("state bits must be 0 or 1")


def step_xax(x_in: int, a_in: int, s_in: int, state: XaxState):
    """One clock cycle of the XOR-AND-XOR cell.

    Returns (x_out, acc_out, new_state), where the outputs are the
    register values *before* the edge and new_state holds the values
    latched by it: xr' = x_in, ar' = a_in,
    acc' = ((x_in xor xr) and ar) xor s_in.
    """
    x_in, a_in, s_in = int(x_in), int(a_in), int(s_in)
    acc_next = ((x_in ^ state.xr) & state.ar) ^ s_in
    return state.xr, state.acc, XaxState(x_in, a_in, acc_next)
