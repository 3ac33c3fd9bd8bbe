"""Waveform measurements: digitization, slew, delay, energy and export.

Logic thresholds reuse the 30%/70% slew levels: a sample is '1' at or
above 0.7*vdd, '0' at or below 0.3*vdd, and 'x' in between. Propagation
delay is measured at 50% crossings; slew between 30% and 70%. Energy is
trapezoid-integrated supply power.
"""

import io
from dataclasses import dataclass, field

import numpy as np

LOW_FRACTION = 0.3
HIGH_FRACTION = 0.7


class MeasureError(Exception):
    pass


@dataclass
class DigitalTrace:
    """Per-signal (time, level) events with levels in {'0', '1', 'x'}."""

    vdd: float
    events: dict = field(default_factory=dict)  # signal -> [(t, level)]

    def level_at(self, signal: str, t: float) -> str:
        evs = self.events[signal]
        level = "x"
        for et, lv in evs:
            if et <= t:
                level = lv
            else:
                break
        return level


def classify(v: float, vdd: float) -> str:
    if v >= HIGH_FRACTION * vdd:
        return "1"
    if v <= LOW_FRACTION * vdd:
        return "0"
    return "x"


def digitize(waveform, signals, vdd: float) -> DigitalTrace:
    """Threshold node voltages into merged 0/1/x event streams."""
    if vdd <= 0:
        raise ValueError("vdd must be positive")
    trace = DigitalTrace(vdd=vdd)
    for sig in signals:
        v = waveform.voltage(sig)  # raises KeyError on unknown signal
        events = []
        last = None
        for t, val in zip(waveform.time, v):
            level = classify(val, vdd)
            if level != last:
                events.append((float(t), level))
                last = level
        trace.events[sig] = events
    return trace


def _crossings(time, v, level):
    """(t, direction) pairs where v crosses `level`, linearly interpolated."""
    out = []
    for i in range(1, len(v)):
        a, b = v[i - 1], v[i]
        if a == b:
            continue
        if (a < level <= b) or (a > level >= b):
            frac = (level - a) / (b - a)
            t = time[i - 1] + frac * (time[i] - time[i - 1])
            out.append((float(t), 1 if b > a else -1))
    return out


def _edges(time, v, vdd):
    """Completed edges as (kind, t30, t70) for rises, (kind, t70, t30) falls."""
    lo = LOW_FRACTION * vdd
    hi = HIGH_FRACTION * vdd
    crossings = sorted(
        [(t, "lo", d) for t, d in _crossings(time, v, lo)]
        + [(t, "hi", d) for t, d in _crossings(time, v, hi)]
    )
    edges = []
    pending = None  # ("rise"/"fall", start time)
    for t, which, d in crossings:
        if which == "lo" and d > 0:
            pending = ("rise", t)
        elif which == "hi" and d < 0:
            pending = ("fall", t)
        elif which == "hi" and d > 0:
            if pending and pending[0] == "rise":
                edges.append(("rise", pending[1], t))
                pending = None
        elif which == "lo" and d < 0:
            if pending and pending[0] == "fall":
                edges.append(("fall", pending[1], t))
                pending = None
    return edges


def slew_time(waveform, signal: str, edge_index: int, vdd: float) -> float:
    """30%-to-70% (rise) or 70%-to-30% (fall) transition time of one edge."""
    edges = _edges(waveform.time, waveform.voltage(signal), vdd)
    if edge_index >= len(edges):
        raise MeasureError(
            f"signal {signal!r} has {len(edges)} complete edge(s); "
            f"index {edge_index} does not cross both thresholds"
        )
    _, t_start, t_end = edges[edge_index]
    return t_end - t_start


@dataclass(frozen=True)
class EdgeDelay:
    t_in: float
    t_out: float
    negative: bool

    @property
    def delay(self) -> float:
        return self.t_out - self.t_in


def propagation_delay(waveform, in_signal: str, out_signal: str, vdd: float):
    """50%-crossing delays, one per output transition.

    Each output transition pairs with the latest preceding input
    transition; an output with no preceding input pairs with the first
    following one and is flagged negative.
    """
    mid = 0.5 * vdd
    t_in = [t for t, _ in _crossings(waveform.time, waveform.voltage(in_signal), mid)]
    t_out = [t for t, _ in _crossings(waveform.time, waveform.voltage(out_signal), mid)]
    if t_out and not t_in:
        raise MeasureError(f"no input transitions to pair with {out_signal!r}")
    results = []
    for to in t_out:
        preceding = [ti for ti in t_in if ti <= to]
        if preceding:
            results.append(EdgeDelay(preceding[-1], to, False))
        else:
            results.append(EdgeDelay(t_in[0], to, True))
    return results


def supply_energy(waveform, source: str, window=None):
    """(joules, average watts) of power delivered by a source over a window."""
    i = waveform.source_current(source)
    matches = [k for k, n in enumerate(waveform.src_names)
               if n.lower() == source.lower()]
    if not matches:
        raise KeyError(f"unknown source {source!r}")
    plus, minus = waveform.src_terms[matches[0]]
    v = waveform.volts[:, plus] - waveform.volts[:, minus]
    t = waveform.time
    if window is None:
        t0, t1 = float(t[0]), float(t[-1])
    else:
        t0, t1 = window
        if t0 < t[0] - 1e-18 or t1 > t[-1] + 1e-18 or t1 <= t0:
            raise MeasureError("window must lie within the waveform and be nonempty")
    mask = (t >= t0 - 1e-18) & (t <= t1 + 1e-18)
    energy = float(np.trapezoid((v * i)[mask], t[mask]))
    return energy, energy / (t1 - t0)


@dataclass(frozen=True)
class PowerEstimate:
    alpha: float
    c: float
    f: float
    vdd: float

    @property
    def p_dyn(self) -> float:
        return self.alpha * self.c * self.f * self.vdd**2


def dynamic_power(alpha: float, c: float, f: float, vdd: float) -> PowerEstimate:
    """Switching-power estimate alpha*C*f*Vdd^2."""
    if min(alpha, c, f, vdd) < 0:
        raise ValueError("all inputs must be non-negative")
    return PowerEstimate(alpha, c, f, vdd)


def export_csv(waveform, signals=None) -> str:
    """CSV with a time column and one full-precision column per signal."""
    if signals is None:
        signals = list(waveform.nets[1:])  # skip ground
    cols = [waveform.voltage(s) for s in signals]
    buf = io.StringIO()
    buf.write("time," + ",".join(signals) + "\n")
    for i, t in enumerate(waveform.time):
        row = [repr(float(t))] + [repr(float(c[i])) for c in cols]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def export_vcd(trace: DigitalTrace, timescale_s: float = 1e-12, name="mrlsim") -> str:
    """Value-change dump of a digital trace; X states emit as 'x'."""
    buf = io.StringIO()
    buf.write("$timescale 1ps $end\n")
    buf.write(f"$scope module {name} $end\n")
    ids = {}
    for i, sig in enumerate(trace.events):
        ident = chr(33 + i)
        ids[sig] = ident
        buf.write(f"$var wire 1 {ident} {sig} $end\n")
    buf.write("$upscope $end\n$enddefinitions $end\n")
    changes = []  # (ticks, ident, level)
    for sig, events in trace.events.items():
        for t, level in events:
            changes.append((int(round(t / timescale_s)), ids[sig], level))
    changes.sort(key=lambda c: (c[0], c[1]))
    last_tick = None
    for tick, ident, level in changes:
        if tick != last_tick:
            buf.write(f"#{tick}\n")
            last_tick = tick
        buf.write(f"{level}{ident}\n")
    return buf.getvalue()
