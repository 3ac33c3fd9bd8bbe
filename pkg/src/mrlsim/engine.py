"""Fixed-step transient engine over a FlatCircuit.

Per step: evaluate sources (PWL interpolation), solve the resistive
network by nodal analysis with MNA source rows (MOSFET switch regions
found by fixed-point iteration, capacitors as backward-Euler companions),
then advance memristor states with explicit midpoint substeps under the
solved branch voltage. Deterministic: identical inputs give bit-identical
waveforms.
"""

from dataclasses import dataclass, field

import numpy as np

from mrlsim import _kernels
from mrlsim.netlist import FlatCircuit, no_dc_path_nets


class SolverError(Exception):
    pass


class SingularMatrixError(SolverError):
    """Floating subnetwork: some nets have no conductive path to ground."""

    def __init__(self, nets):
        self.nets = list(nets)
        super().__init__(
            "singular system; nets without a path to ground: " + ", ".join(self.nets)
        )


@dataclass(frozen=True)
class SimOptions:
    tstep: float
    tstop: float
    max_switch_iters: int = 50
    voltage_tol: float = 1e-6
    state_substeps: int = 4
    clamp_states: bool = True

    def __post_init__(self):
        if self.tstep <= 0 or self.tstop < self.tstep:
            raise ValueError("require 0 < tstep <= tstop")
        if self.max_switch_iters < 1:
            raise ValueError("max_switch_iters must be >= 1")
        if self.state_substeps < 1:
            raise ValueError("state_substeps must be >= 1")


@dataclass
class Waveform:
    """Sampled node voltages, source branch currents and memristor states.

    Source currents are recorded as current delivered from the + terminal
    into the circuit, so v*(delivered i) is power supplied.
    """

    time: np.ndarray
    nets: list
    volts: np.ndarray  # (nT, n_nets)
    src_names: list
    src_currents: np.ndarray  # (nT, n_src)
    mem_names: list
    states: np.ndarray  # (nT, n_mem)
    src_terms: list = field(default_factory=list)  # (plus, minus) net indices
    warnings: list = field(default_factory=list)

    def voltage(self, net: str) -> np.ndarray:
        return self.volts[:, self._net_index(net)]

    def source_current(self, name: str) -> np.ndarray:
        return self.src_currents[:, self._name_index(self.src_names, name, "source")]

    def state(self, name: str) -> np.ndarray:
        return self.states[:, self._name_index(self.mem_names, name, "memristor")]

    def _net_index(self, net):
        lowered = net.lower()
        for i, n in enumerate(self.nets):
            if n.lower() == lowered:
                return i
        raise KeyError(f"unknown net {net!r}")

    @staticmethod
    def _name_index(names, name, what):
        lowered = name.lower()
        for i, n in enumerate(names):
            if n.lower() == lowered:
                return i
        raise KeyError(f"unknown {what} {name!r}")


class _Arrays:
    """FlatCircuit lowered to the plain arrays the kernels consume."""

    def __init__(self, flat: FlatCircuit):
        self.nn = len(flat.nets)
        res_a, res_b, res_g = [], [], []
        cap_a, cap_b, cap_c, cap_v0 = [], [], [], []
        vs_p, vs_n, vs_t, vs_v, vs_toff = [], [], [], [], [0]
        self.src_names = []
        mem = {k: [] for k in ("a", "b", "gon", "goff", "rlin", "pol",
                               "rate", "vch", "pexp", "x0")}
        self.mem_names = []
        mos_d, mos_g, mos_s, mos_pol, mos_vth, mos_gon, mos_goff = (
            [], [], [], [], [], [], [])
        from mrlsim.devices import MemristorParams

        for d in flat.devices:
            if d.kind == "R":
                res_a.append(d.terminals[0])
                res_b.append(d.terminals[1])
                res_g.append(1.0 / d.params["value"])
            elif d.kind == "C":
                cap_a.append(d.terminals[0])
                cap_b.append(d.terminals[1])
                cap_c.append(d.params["value"])
                cap_v0.append(d.params.get("ic", 0.0))
            elif d.kind == "V":
                vs_p.append(d.terminals[0])
                vs_n.append(d.terminals[1])
                if "dc" in d.params:
                    # two knots so np.interp is well-defined everywhere
                    vs_t.extend([0.0, 1.0])
                    vs_v.extend([d.params["dc"], d.params["dc"]])
                else:
                    pt, pv = d.params["pwl_t"], d.params["pwl_v"]
                    if len(pt) == 1:
                        pt = [pt[0], pt[0] + 1.0]
                        pv = [pv[0], pv[0]]
                    vs_t.extend(pt)
                    vs_v.extend(pv)
                vs_toff.append(len(vs_t))
                self.src_names.append(d.name)
            elif d.kind == "Y":
                p = d.params
                mp = MemristorParams(
                    r_on=p["r_on"],
                    r_off=p["r_off"],
                    l_disc=p["l_disc"],
                    l_taox=p["l_taox"],
                    area=p["area"],
                    n_min=p["n_min"],
                    n_max=p["n_max"],
                    z_v0=p["z_v0"],
                    c31=p["c31"],
                    v_char=p["v_char"],
                    window_exponent=p["window_exponent"],
                    resistance_linear=bool(p.get("resistance_linear", 0.0)),
                )
                a, b = d.terminals
                if p.get("polarity", 1.0) < 0:
                    a, b = b, a  # conductance is symmetric; swap flips drift sign
                mem["a"].append(a)
                mem["b"].append(b)
                mem["gon"].append(1.0 / mp.r_on)
                mem["goff"].append(1.0 / mp.r_off)
                mem["rlin"].append(1 if mp.resistance_linear else 0)
                mem["pol"].append(1.0)
                mem["rate"].append(mp.drift_rate)
                mem["vch"].append(mp.v_char)
                mem["pexp"].append(mp.window_exponent)
                x0 = d.initial_state if d.initial_state is not None else 0.5
                mem["x0"].append(x0)
                self.mem_names.append(d.name)
            elif d.kind == "M":
                p = d.params
                mos_d.append(d.terminals[0])
                mos_g.append(d.terminals[1])
                mos_s.append(d.terminals[2])
                mos_pol.append(p["polarity"])
                mos_vth.append(p["v_th"])
                mos_gon.append(1.0 / p["r_ds_on"])
                mos_goff.append(1.0 / p["r_ds_off"])
            else:  # pragma: no cover
                raise SolverError(f"unsupported device kind {d.kind!r}")

        ia = np.asarray
        f8 = np.float64
        self.res_a = ia(res_a, np.int64)
        self.res_b = ia(res_b, np.int64)
        self.res_g = ia(res_g, f8)
        self.cap_a = ia(cap_a, np.int64)
        self.cap_b = ia(cap_b, np.int64)
        self.cap_c = ia(cap_c, f8)
        self.cap_v0 = ia(cap_v0, f8)
        self.vs_p = ia(vs_p, np.int64)
        self.vs_n = ia(vs_n, np.int64)
        self.vs_toff = ia(vs_toff, np.int64)
        self.vs_t = ia(vs_t, f8)
        self.vs_v = ia(vs_v, f8)
        self.mem_a = ia(mem["a"], np.int64)
        self.mem_b = ia(mem["b"], np.int64)
        self.mem_gon = ia(mem["gon"], f8)
        self.mem_goff = ia(mem["goff"], f8)
        self.mem_rlin = ia(mem["rlin"], np.uint8)
        self.mem_pol = ia(mem["pol"], f8)
        self.mem_rate = ia(mem["rate"], f8)
        self.mem_vch = ia(mem["vch"], f8)
        self.mem_pexp = ia(mem["pexp"], f8)
        self.mem_x0 = ia(mem["x0"], f8)
        self.mos_d = ia(mos_d, np.int64)
        self.mos_g = ia(mos_g, np.int64)
        self.mos_s = ia(mos_s, np.int64)
        self.mos_pol = ia(mos_pol, f8)
        self.mos_vth = ia(mos_vth, f8)
        self.mos_gon = ia(mos_gon, f8)
        self.mos_goff = ia(mos_goff, f8)


def _options_from(flat, options):
    if options is not None:
        return options
    trans = [a for a in flat.analyses if a.kind == "tran"]
    if len(trans) != 1:
        raise SolverError(
            "need exactly one .tran analysis or explicit SimOptions"
        )
    return SimOptions(tstep=trans[0].tstep, tstop=trans[0].tstop)


def _check_solvable(flat):
    bad = no_dc_path_nets(flat)
    if bad:
        raise SingularMatrixError(bad)


def run_transient(flat: FlatCircuit, options: SimOptions = None) -> Waveform:
    """March the circuit from t=0 to tstop on a fixed grid."""
    opts = _options_from(flat, options)
    _check_solvable(flat)
    arr = _Arrays(flat)
    n_steps = int(round(opts.tstop / opts.tstep))
    vhist, ihist, xhist, osc_steps, n_osc = _kernels._march(
        arr.nn,
        n_steps,
        opts.tstep,
        arr.res_a, arr.res_b, arr.res_g,
        arr.cap_a, arr.cap_b, arr.cap_c, arr.cap_v0,
        arr.vs_p, arr.vs_n, arr.vs_toff, arr.vs_t, arr.vs_v,
        arr.mem_a, arr.mem_b, arr.mem_gon, arr.mem_goff, arr.mem_rlin,
        arr.mem_pol, arr.mem_rate, arr.mem_vch, arr.mem_pexp, arr.mem_x0,
        arr.mos_d, arr.mos_g, arr.mos_s, arr.mos_pol, arr.mos_vth,
        arr.mos_gon, arr.mos_goff,
        opts.max_switch_iters,
        opts.state_substeps,
        1 if opts.clamp_states else 0,
    )
    warnings = []
    if n_osc > 0:
        shown = [int(s) for s in osc_steps if s >= 0]
        warnings.append(
            (shown[0] * opts.tstep,
             f"switch-region oscillation at {n_osc} step(s); "
             f"smallest-change iterate accepted (first at step {shown[0]})")
        )
    time = np.arange(n_steps + 1, dtype=np.float64) * opts.tstep
    return Waveform(
        time=time,
        nets=list(flat.nets),
        volts=vhist,
        src_names=arr.src_names,
        src_currents=ihist,
        mem_names=arr.mem_names,
        states=xhist,
        src_terms=[(int(p), int(n)) for p, n in zip(arr.vs_p, arr.vs_n)],
        warnings=warnings,
    )


def solve_step(
    flat: FlatCircuit,
    t: float,
    prev_voltages: dict = None,
    states: dict = None,
    options: SimOptions = None,
):
    """Single network solve at time t with frozen memristor states.

    ``prev_voltages`` seeds the switch-region iteration (default all 0 V);
    ``states`` overrides memristor x values by device name. Returns
    (node voltages dict, source currents dict).
    """
    if options is not None:
        opts = options
    else:
        try:
            opts = _options_from(flat, None)
        except SolverError:
            if any(d.kind == "C" for d in flat.devices):
                raise
            opts = SimOptions(tstep=1e-12, tstop=1e-12)  # tstep unused without caps
    _check_solvable(flat)
    arr = _Arrays(flat)
    v_guess = np.zeros(arr.nn)
    if prev_voltages:
        for net, val in prev_voltages.items():
            lowered = net.lower()
            for i, n in enumerate(flat.nets):
                if n.lower() == lowered:
                    v_guess[i] = val
                    break
            else:
                raise KeyError(f"unknown net {net!r}")
    x = arr.mem_x0.copy()
    if states:
        for name, val in states.items():
            idx = Waveform._name_index(arr.mem_names, name, "memristor")
            x[idx] = val
    vs_val = np.zeros(arr.vs_p.size)
    for k in range(arr.vs_p.size):
        lo, hi = arr.vs_toff[k], arr.vs_toff[k + 1]
        vs_val[k] = np.interp(t, arr.vs_t[lo:hi], arr.vs_v[lo:hi])
    mem_gnow = np.array(
        [
            _kernels._mem_conductance(
                x[j], arr.mem_gon[j], arr.mem_goff[j], arr.mem_rlin[j]
            )
            for j in range(x.size)
        ]
    )
    if mem_gnow.size == 0:
        mem_gnow = np.zeros(0)
    cap_g = arr.cap_c / opts.tstep if arr.cap_c.size else np.zeros(0)
    cap_ieq = cap_g * arr.cap_v0 if arr.cap_c.size else np.zeros(0)
    v, ibr, conv = _kernels._solve_network(
        arr.nn,
        arr.res_a, arr.res_b, arr.res_g,
        arr.cap_a, arr.cap_b, cap_g, cap_ieq,
        arr.vs_p, arr.vs_n, vs_val,
        arr.mem_a, arr.mem_b, mem_gnow,
        arr.mos_d, arr.mos_g, arr.mos_s, arr.mos_pol, arr.mos_vth,
        arr.mos_gon, arr.mos_goff,
        v_guess,
        opts.max_switch_iters,
    )
    voltages = {net: float(v[i]) for i, net in enumerate(flat.nets)}
    currents = {name: float(ibr[k]) for k, name in enumerate(arr.src_names)}
    return voltages, currents
