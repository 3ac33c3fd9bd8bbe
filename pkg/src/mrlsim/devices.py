"""Behavioral device models: Pt/TaOx/Ta memristor and switch-level MOSFET.

The memristor stores a normalized state x in [0, 1] (scaled oxygen-vacancy
concentration). Its resistance interpolates between r_on (x=1) and r_off
(x=0); by default the interpolation is linear in conductance. State drift
follows an ionic-current law i_ion = -(c31/l_disc)*sinh(v/v_char), divided
by the charge stored per unit concentration change, with a direction
dependent window so x saturates smoothly at the rails.

All functions are pure; the transient engine re-implements the same math
in array form (see _kernels).
"""

import math
from dataclasses import dataclass

ELEMENTARY_CHARGE = 1.602176634e-19  # C


@dataclass(frozen=True)
class MemristorParams:
    """Physical and behavioral parameters of the Pt/TaOx/Ta device.

    Geometry defaults follow the published device (disc 4 nm, total oxide
    11 nm, area 3.14e4 nm^2, c31 = 6e-12 A*m/V). The concentration bounds
    and the sinh law scale are configurable; logic-level results depend
    only on r_on/r_off.
    """

    r_on: float = 1e3
    r_off: float = 1e6
    l_disc: float = 4e-9
    l_taox: float = 11e-9
    area: float = 3.14e-14
    n_min: float = 4e25
    n_max: float = 2e27
    z_v0: float = 2.0
    c31: float = 6e-12
    v_char: float = 0.25
    window_exponent: float = 1.0
    resistance_linear: bool = False

    def __post_init__(self):
        if not (self.r_off > self.r_on > 0):
            raise ValueError("require r_off > r_on > 0")
        if not (self.n_max > self.n_min >= 0):
            raise ValueError("require n_max > n_min >= 0")
        if not (self.l_taox > self.l_disc > 0):
            raise ValueError("require l_taox > l_disc > 0")
        if self.area <= 0:
            raise ValueError("area must be positive")
        if self.z_v0 <= 0 or self.c31 <= 0 or self.v_char <= 0:
            raise ValueError("z_v0, c31 and v_char must be positive")
        if self.window_exponent <= 0:
            raise ValueError("window_exponent must be positive")

    @property
    def l_plug(self) -> float:
        """Plug-zone length; kept for documentation of the two-layer stack."""
        return self.l_taox - self.l_disc

    @property
    def drift_rate(self) -> float:
        """Prefactor of dx/dt: (c31/l_disc) / (e*z_v0*A*l_disc*(n_max-n_min))."""
        denom = (
            ELEMENTARY_CHARGE
            * self.z_v0
            * self.area
            * self.l_disc
            * (self.n_max - self.n_min)
        )
        return (self.c31 / self.l_disc) / denom


@dataclass
class MemristorState:
    """Normalized state x = (N - N_min)/(N_max - N_min), clamped to [0, 1]."""

    x: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError("state x must lie in [0, 1]")


@dataclass(frozen=True)
class MosfetParams:
    """Switch-level MOSFET: on/off resistance selected by the gate voltage."""

    polarity: str = "N"  # "N" or "P"
    v_th: float = 0.3
    r_ds_on: float = 100.0
    r_ds_off: float = 1e9

    def __post_init__(self):
        if self.polarity not in ("N", "P"):
            raise ValueError("polarity must be 'N' or 'P'")
        if self.v_th <= 0:
            raise ValueError("v_th must be positive")
        if self.r_ds_off < 1000.0 * self.r_ds_on:
            raise ValueError("require r_ds_off >= 1000 * r_ds_on")


def memristance(state: MemristorState, params: MemristorParams) -> float:
    """Resistance at the given state.

    Conductance-linear by default: G(x) = x*G_on + (1-x)*G_off, so
    R(1) = r_on and R(0) = r_off, monotone decreasing in x. With
    ``resistance_linear`` set, R(x) = x*r_on + (1-x)*r_off instead.
    """
    x = state.x
    if params.resistance_linear:
        return x * params.r_on + (1.0 - x) * params.r_off
    g = x / params.r_on + (1.0 - x) / params.r_off
    return 1.0 / g


def state_derivative(state: MemristorState, v: float, params: MemristorParams) -> float:
    """dx/dt under voltage v applied at the forward-polarity (bar) terminal.

    Positive v drives x toward 1 (resistance decreases). The drift is the
    sinh ionic-current law scaled by drift_rate, multiplied by a window
    1 - x^(2p) when increasing and 1 - (1-x)^(2p) when decreasing.
    """
    rate = params.drift_rate * math.sinh(v / params.v_char)
    if rate == 0.0:
        return 0.0
    x = min(max(state.x, 0.0), 1.0)
    p2 = 2.0 * params.window_exponent
    if rate > 0.0:
        window = 1.0 - x**p2
    else:
        window = 1.0 - (1.0 - x) ** p2
    return rate * window


def memristor_current(state: MemristorState, v: float, params: MemristorParams) -> float:
    """Ohmic current at the instantaneous memristance; exactly 0 at v=0."""
    if v == 0.0:
        return 0.0
    return v / memristance(state, params)


def mosfet_conductance(v_gs: float, v_ds: float, params: MosfetParams) -> float:
    """Drain-source conductance of the switch-level model.

    N conducts when v_gs > v_th, P when v_gs < -v_th. v_ds is unused but
    kept in the signature for model upgrades.
    """
    del v_ds
    sign = 1.0 if params.polarity == "N" else -1.0
    if sign * v_gs > params.v_th:
        return 1.0 / params.r_ds_on
    return 1.0 / params.r_ds_off
