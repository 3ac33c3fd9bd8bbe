"""Analog-vs-oracle equivalence checking for generated MRL blocks.

Stimulus discipline: time is divided into slots. Inputs change at slot
boundaries with a short ramp. For clocked blocks the clock idles high
(masters opaque), falls at 0.45 of a slot with an edge so the master
tracks settled combinational values, and rises at 0.85 to capture;
outputs are sampled one timestep before the slot boundary, i.e. after
the capture. Inputs a block declares as conditioned are additionally
driven to 1 for the first quarter of each slot so the pull-up devices
they feed re-program every cycle. Combinational blocks use a shorter
settle window per slot. Sampled voltages are digitized with the 0.3/0.7
thresholds; an 'x' at a sample instant is reported separately from a
0/1 mismatch.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from mrlsim import gates, golden
from mrlsim.engine import SimOptions, run_transient
from mrlsim.measure import classify
from mrlsim.netlist import expand, parse


@dataclass(frozen=True)
class VerifyConfig:
    vdd: float = 1.0
    clock_period: float = 1e-9
    tstep: float = 1e-12
    settle: float = 0.4e-9  # combinational slot length
    slew: float = 50e-12  # input edge ramp time
    seed: int = 0
    sequences: int = 100  # random mode runs
    cycles: int = 8  # random cycles per run

    def __post_init__(self):
        if min(self.vdd, self.clock_period, self.tstep, self.settle) <= 0:
            raise ValueError("vdd and all times must be positive")
        if self.tstep >= self.settle or 2 * self.tstep >= self.clock_period:
            raise ValueError("tstep too coarse for the slot timing")


@dataclass(frozen=True)
class Divergence:
    time: float
    signal: str
    expected: str
    observed: str

    def __str__(self):
        return (
            f"t={self.time:.3e}s {self.signal}: "
            f"expected {self.expected}, observed {self.observed}"
        )


@dataclass
class EquivalenceReport:
    block: str
    mode: str
    passed: bool
    vectors: int
    divergences: list = field(default_factory=list)
    x_failures: list = field(default_factory=list)
    seeds: list = field(default_factory=list)
    header: dict = field(default_factory=dict)

    @property
    def first_divergence(self):
        issues = sorted(self.divergences + self.x_failures, key=lambda d: d.time)
        return issues[0] if issues else None

    def summary(self) -> str:
        lines = [f"block: {self.block}", f"mode: {self.mode}"]
        for k, v in self.header.items():
            lines.append(f"{k}: {v}")
        if self.seeds:
            lines.append(f"seeds: {', '.join(str(s) for s in self.seeds)}")
        lines.append(f"vectors: {self.vectors}")
        if self.passed:
            lines.append("verdict: PASS")
        else:
            lines.append("verdict: FAIL")
            first = self.first_divergence
            kind = "settling failure (x)" if first in self.x_failures else "mismatch"
            lines.append(f"first divergence ({kind}): {first}")
            lines.append(
                f"mismatches: {len(self.divergences)}, "
                f"x at sample: {len(self.x_failures)}"
            )
        return "\n".join(lines)


def _pwl_points(slot_levels, period, ramp):
    """PWL knots for a per-slot level sequence with ramped transitions."""
    pts = [(0.0, slot_levels[0])]
    for k in range(1, len(slot_levels)):
        prev, new = slot_levels[k - 1], slot_levels[k]
        if new != prev:
            t = k * period
            pts.append((t, prev))
            pts.append((t + ramp, new))
    return pts


CLOCK_RAMP = 50e-12  # clock edge time, independent of the data slew
CLOCK_FALL = 0.45  # fraction of the slot where transparency opens
CLOCK_RISE = 0.85  # fraction of the slot where capture happens


def _clock_points(edges, period, ramp):
    """Clock knots for the capture-late discipline.

    The clock idles high (masters opaque). In a slot with an edge it
    falls at 0.45 of the slot, letting the master track once the
    combinational nodes have settled from the boundary input change,
    and rises at 0.85 to capture, leaving the slave 0.15 of a period to
    finish flipping before the end-of-slot sample. Clock ramps are a
    fixed 50 ps so slowing the data slew never smears the capture edge.
    """
    del ramp
    pts = [(0.0, 1.0)]
    for k, edge in enumerate(edges):
        if edge:
            t_fall = k * period + CLOCK_FALL * period
            pts.append((t_fall, 1.0))
            pts.append((t_fall + CLOCK_RAMP, 0.0))
            t_rise = k * period + CLOCK_RISE * period
            pts.append((t_rise, 0.0))
            pts.append((t_rise + CLOCK_RAMP, 1.0))
    # drop non-increasing duplicates (possible when edges are adjacent)
    out = [pts[0]]
    for t, v in pts[1:]:
        if t > out[-1][0]:
            out.append((t, v))
    return out


PRECHARGE_FRACTION = 0.25  # slot fraction spent at 1 on conditioned inputs


def _precharge_points(slot_levels, period, ramp):
    """PWL knots that visit 1 at each slot start before the slot level.

    Used for a block's conditioned inputs (see Block.conditioned_inputs):
    the input is driven to 1 for the first quarter of every slot, then
    ramped to its actual level, so the pull-up path it feeds carries
    current and re-programs each cycle. Slot 0 is left plain so the
    power-up flush is undisturbed.
    """
    pts = [(0.0, float(slot_levels[0]))]
    for k, level in enumerate(slot_levels):
        if k == 0:
            continue
        t0 = k * period
        prev = pts[-1][1]
        if prev != 1.0:
            pts.append((t0, prev))
            pts.append((t0 + ramp, 1.0))
        if level != 1.0:
            pts.append((t0 + PRECHARGE_FRACTION * period, 1.0))
            pts.append((t0 + PRECHARGE_FRACTION * period + ramp, float(level)))
    out = [pts[0]]
    for t, v in pts[1:]:
        if t > out[-1][0]:
            out.append((t, v))
    return out


def _pwl_card(name, net, points, vdd=1.0):
    body = " ".join(f"{repr(float(t))} {repr(float(v * vdd))}" for t, v in points)
    return f"{name} {net} 0 PWL( {body} )"


def _build_harness(block, input_slots, clk_edges, period, cfg):
    """Netlist text plus sample info for a slot-based stimulus run."""
    n_slots = len(next(iter(input_slots.values())))
    tstop = n_slots * period
    lines = [f"* equivalence harness for {block.name}"]
    lines.append(gates.DEFAULT_MODEL_DECK.rstrip())
    lines.append(block.text.rstrip())
    lines.append(f"Vvdd vdd 0 DC {repr(float(cfg.vdd))}")
    for port, levels in input_slots.items():
        if port in block.conditioned_inputs:
            pts = _precharge_points(levels, period, cfg.slew)
        else:
            pts = _pwl_points(levels, period, cfg.slew)
        lines.append(_pwl_card(f"Vin_{port}", port, pts, cfg.vdd))
    if clk_edges is not None:
        pts = _clock_points(clk_edges, period, cfg.slew)
        lines.append(_pwl_card("Vclk", "clk", pts, cfg.vdd))
    lines.append(f"Xdut {' '.join(block.ports)} {block.name}")
    lines.append(f".tran {repr(float(cfg.tstep))} {repr(float(tstop))}")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def _run_slots(block, input_slots, clk_edges, period, cfg):
    """Simulate and return per-slot sampled voltages of the block outputs."""
    text = _build_harness(block, input_slots, clk_edges, period, cfg)
    flat = expand(parse(text))
    wave = run_transient(flat)
    n_slots = len(next(iter(input_slots.values())))
    samples = {}
    for out in block.outputs:
        v = wave.voltage(out)
        vals = []
        for k in range(n_slots):
            t_sample = (k + 1) * period - cfg.tstep
            idx = int(round(t_sample / cfg.tstep))
            vals.append(float(v[idx]))
        samples[out] = vals
    sample_times = [(k + 1) * period - cfg.tstep for k in range(n_slots)]
    return wave, samples, sample_times


def _compare(report, samples, sample_times, expected, cfg):
    """Check sampled levels against expectations; None entries are skipped."""
    for sig, levels in expected.items():
        for k, exp in enumerate(levels):
            if exp is None:
                continue
            report.vectors += 1
            obs = classify(samples[sig][k], cfg.vdd)
            if obs == "x":
                report.x_failures.append(
                    Divergence(sample_times[k], sig, str(exp), "x")
                )
            elif obs != str(exp):
                report.divergences.append(
                    Divergence(sample_times[k], sig, str(exp), obs)
                )


def _gate_vectors(kind, mode, cfg, rng=None):
    arity = golden.GATE_ARITY[kind]
    if mode == "exhaustive":
        if arity == 1:
            return [(b,) for b in (0, 1, 0, 1, 0, 1, 0, 1)]
        return list(itertools.product((0, 1), repeat=2))
    n = 16
    return [tuple(int(b) for b in rng.integers(0, 2, size=arity)) for _ in range(n)]


def _verify_gate(kind, mode, cfg):
    block = gates.build_gate(kind)
    rng = np.random.default_rng(cfg.seed)
    vectors = _gate_vectors(kind, mode, cfg, rng)
    input_slots = {
        port: [v[i] for v in vectors] for i, port in enumerate(block.inputs)
    }
    report = EquivalenceReport(block=kind, mode=mode, passed=False, vectors=0)
    if mode == "random":
        report.seeds = [cfg.seed]
    _, samples, times = _run_slots(block, input_slots, None, cfg.settle, cfg)
    expected = {"y": [golden.eval_gate(kind, v) for v in vectors]}
    _compare(report, samples, times, expected, cfg)
    report.passed = not report.divergences and not report.x_failures
    report.header = _header(cfg, slots=len(vectors))
    return report


def _verify_dlatch(mode, cfg):
    block = gates.build_dlatch()
    if mode == "exhaustive":
        # transparent tracking, then holds under d toggling, for both levels
        seq = [(1, 1), (0, 1), (1, 1), (1, 0), (0, 0), (1, 0),
               (0, 1), (0, 0), (1, 0), (0, 0)]
        seeds = []
    else:
        rng = np.random.default_rng(cfg.seed)
        seq = [(1, 1)] + [
            (int(rng.integers(0, 2)), int(rng.integers(0, 2))) for _ in range(15)
        ]
        seeds = [cfg.seed]
    input_slots = {
        "d": [d for d, _ in seq],
        "en": [en for _, en in seq],
    }
    report = EquivalenceReport(block="dlatch", mode=mode, passed=False,
                               vectors=0, seeds=seeds)
    _, samples, times = _run_slots(block, input_slots, None, cfg.clock_period, cfg)
    q = None
    expected_q = []
    for d, en in seq:
        q = golden.step_dlatch(d, en, q if q is not None else d)
        expected_q.append(q)
    _compare(report, samples, times, {"q": expected_q}, cfg)
    report.passed = not report.divergences and not report.x_failures
    report.header = _header(cfg, slots=len(seq))
    return report


def _verify_dff(mode, cfg):
    block = gates.build_dff()
    slots = []  # (d, has_edge)
    if mode == "exhaustive":
        for q0, d, edge in itertools.product((0, 1), (0, 1), (True, False)):
            slots.append((q0, True))  # preamble establishes q = q0
            slots.append((d, edge))
        seeds = []
    else:
        rng = np.random.default_rng(cfg.seed)
        slots = [(0, True)] + [
            (int(rng.integers(0, 2)), bool(rng.integers(0, 2))) for _ in range(15)
        ]
        seeds = [cfg.seed]
    input_slots = {"d": [d for d, _ in slots]}
    edges = [e for _, e in slots]
    report = EquivalenceReport(block="dff", mode=mode, passed=False,
                               vectors=0, seeds=seeds)
    _, samples, times = _run_slots(block, input_slots, edges, cfg.clock_period, cfg)
    q = slots[0][0]  # slot 0 always has an edge
    expected_q = []
    for d, edge in slots:
        q = golden.step_dff(d, "rising" if edge else "none", q)
        expected_q.append(q)
    _compare(report, samples, times, {"q": expected_q}, cfg)
    report.passed = not report.divergences and not report.x_failures
    report.header = _header(cfg, slots=len(slots))
    return report


def _xax_coverage_sequence():
    """Eulerian circuit over all 64 (state, input) pairs, starting at 000."""
    def step(state, inp):
        xr, ar, acc = state
        x, a, s = inp
        return (x, a, ((x ^ xr) & ar) ^ s)

    unused = {
        state: [(x, a, s) for x in (0, 1) for a in (0, 1) for s in (0, 1)]
        for state in itertools.product((0, 1), repeat=3)
    }
    # Hierholzer
    stack = [(0, 0, 0)]
    path_edges = []
    edge_stack = []
    while stack:
        state = stack[-1]
        if unused[state]:
            inp = unused[state].pop()
            edge_stack.append(inp)
            stack.append(step(state, inp))
        else:
            stack.pop()
            if edge_stack and stack:
                path_edges.append(edge_stack.pop())
    path_edges.reverse()
    assert len(path_edges) == 64
    return path_edges


def _run_xax_sequence(block, inputs, cfg, report, oracle_state):
    """One clocked run; compares registered outputs for slots >= 1."""
    n = len(inputs)
    input_slots = {
        "x_in": [v[0] for v in inputs],
        "a_in": [v[1] for v in inputs],
        "s_in": [v[2] for v in inputs],
    }
    edges = [True] * n
    _, samples, times = _run_slots(block, input_slots, edges, cfg.clock_period, cfg)
    state = oracle_state
    expected = {"x_out": [], "acc_out": []}
    for k, (x, a, s) in enumerate(inputs):
        _, _, state = golden.step_xax(x, a, s, state)
        # sample reads the registers *after* this slot's edge
        known = k >= 1  # analog power-up state unknown until flushed
        expected["x_out"].append(state.xr if known else None)
        expected["acc_out"].append(state.acc if known else None)
    _compare(report, samples, times, expected, cfg)


def _verify_xax(mode, cfg):
    block = gates.build_xax()
    report = EquivalenceReport(block="xax", mode=mode, passed=False, vectors=0)
    if mode == "exhaustive":
        seq = [(0, 0, 0), (0, 0, 0)] + _xax_coverage_sequence()
        _run_xax_sequence(block, seq, cfg, report, golden.XaxState())
        report.header = _header(cfg, slots=len(seq), coverage="all 64 state x input pairs")
    else:
        for i in range(cfg.sequences):
            seed = cfg.seed + i
            rng = np.random.default_rng(seed)
            seq = [(0, 0, 0), (0, 0, 0)] + [
                tuple(int(b) for b in rng.integers(0, 2, size=3))
                for _ in range(cfg.cycles)
            ]
            report.seeds.append(seed)
            _run_xax_sequence(block, seq, cfg, report, golden.XaxState())
        report.header = _header(
            cfg, sequences=cfg.sequences, cycles_per_sequence=cfg.cycles
        )
    report.passed = not report.divergences and not report.x_failures
    return report


def _header(cfg, **extra):
    header = {
        "vdd (V)": cfg.vdd,
        "clock period (s)": cfg.clock_period,
        "tstep (s)": cfg.tstep,
        "settle window (s)": cfg.settle,
        "stimulus": "inputs change at slot boundaries (ramped); clock "
        "idles high, opens at 0.45 and captures at 0.85 of a slot; "
        "outputs sampled one step before the next boundary",
    }
    header.update(extra)
    return header


def equivalence_check(block: str, mode: str, cfg: VerifyConfig = VerifyConfig()):
    """Drive the generated block against its oracle; returns a report."""
    block = block.lower()
    if mode not in ("exhaustive", "random"):
        raise ValueError("mode must be 'exhaustive' or 'random'")
    if block in gates.GATE_KINDS:
        return _verify_gate(block, mode, cfg)
    if block == "dlatch":
        return _verify_dlatch(mode, cfg)
    if block == "dff":
        return _verify_dff(mode, cfg)
    if block == "xax":
        return _verify_xax(mode, cfg)
    raise ValueError(f"unsupported block {block!r}")
