"""Measurement tests: thresholds, slew, delay, energy, exports."""

import math

import numpy as np
import pytest

from mrlsim.engine import run_transient
from mrlsim.measure import (
    MeasureError,
    classify,
    digitize,
    dynamic_power,
    export_csv,
    export_vcd,
    propagation_delay,
    slew_time,
    supply_energy,
)
from mrlsim.netlist import expand, parse


def run(body, tran=".tran 1p 1n"):
    return run_transient(expand(parse(f"* fixture\n{body}\n{tran}\n.end\n")))


def test_classify_thresholds():
    assert classify(0.71, 1.0) == "1"
    assert classify(0.7, 1.0) == "1"
    assert classify(0.3, 1.0) == "0"
    assert classify(0.5, 1.0) == "x"
    assert classify(0.5, 2.0) == "0"  # thresholds scale with vdd


def test_digitize_events():
    wave = run("Vs a 0 PWL( 0 0 0.2n 1 0.5n 1 0.7n 0 )")
    trace = digitize(wave, ["a"], 1.0)
    levels = [lv for _, lv in trace.events["a"]]
    assert levels == ["0", "x", "1", "x", "0"]
    assert trace.level_at("a", 0.4e-9) == "1"
    assert trace.level_at("a", 0.0) == "0"
    with pytest.raises(KeyError):
        digitize(wave, ["missing"], 1.0)


def test_slew_time_linear_ramp():
    # 0->1 over 100 ps: 30%-70% segment spans 40 ps
    wave = run("Vs a 0 PWL( 0 0 0.1n 1 )")
    assert slew_time(wave, "a", 0, 1.0) == pytest.approx(40e-12, rel=1e-6)
    with pytest.raises(MeasureError):
        slew_time(wave, "a", 5, 1.0)


def test_slew_time_fall_edge():
    wave = run("Vs a 0 PWL( 0 1 0.3n 1 0.5n 0 )")
    assert slew_time(wave, "a", 0, 1.0) == pytest.approx(80e-12, rel=1e-6)


def test_rc_half_delay():
    # 50% step delay of an RC is ln(2)*tau
    wave = run("Vs in 0 PWL( 0 0 1p 1 )\nR1 in out 1k\nC1 out 0 100f")
    delays = propagation_delay(wave, "in", "out", 1.0)
    assert len(delays) == 1
    tau = 1e3 * 100e-15
    assert delays[0].delay == pytest.approx(math.log(2) * tau, rel=0.02)
    assert not delays[0].negative


def test_propagation_delay_pairs_latest_input():
    wave = run(
        "Vs in 0 PWL( 0 0 1p 1 0.4n 1 0.401n 0 )\n"
        "R1 in out 1k\nC1 out 0 20f"
    )
    delays = propagation_delay(wave, "in", "out", 1.0)
    assert len(delays) == 2
    assert all(d.delay > 0 and not d.negative for d in delays)


def test_supply_energy_dc_resistor():
    # P = V^2/R; over T the energy is V^2*T/R
    wave = run("Vs a 0 DC 1\nR1 a 0 1k", ".tran 1p 1n")
    energy, power = supply_energy(wave, "Vs")
    assert energy == pytest.approx(1.0 * 1e-9 / 1e3, rel=0.005)
    assert power == pytest.approx(1e-3, rel=0.005)


def test_supply_energy_window():
    wave = run("Vs a 0 DC 2\nR1 a 0 1k", ".tran 1p 1n")
    energy, power = supply_energy(wave, "vs", (0.2e-9, 0.7e-9))  # case-insensitive
    assert energy == pytest.approx(4.0 * 0.5e-9 / 1e3, rel=0.005)
    assert power == pytest.approx(4e-3, rel=0.005)
    with pytest.raises(MeasureError):
        supply_energy(wave, "Vs", (0.5e-9, 0.1e-9))
    with pytest.raises(KeyError):
        supply_energy(wave, "Vnope")


def test_dynamic_power_fixture_exact():
    # alpha=0.5, C=2 pF, f=1 GHz, Vdd=1 V -> exactly 1 mW
    est = dynamic_power(0.5, 2e-12, 1e9, 1.0)
    assert est.p_dyn == 0.5 * 2e-12 * 1e9 * 1.0**2
    assert est.p_dyn == 1e-3
    with pytest.raises(ValueError):
        dynamic_power(-0.1, 1e-12, 1e9, 1.0)


def test_export_csv_roundtrip_precision():
    wave = run("Vs a 0 DC 1\nR1 a b 1k\nR2 b 0 1meg", ".tran 1p 10p")
    csv = export_csv(wave, ["b"])
    lines = csv.strip().splitlines()
    assert lines[0] == "time,b"
    t, v = lines[-1].split(",")
    assert float(v) == wave.voltage("b")[-1]  # repr round-trips exactly
    # default signal list covers every net except ground
    assert export_csv(wave).splitlines()[0] == "time," + ",".join(wave.nets[1:])


def test_export_vcd_structure():
    wave = run("Vs a 0 PWL( 0 0 0.2n 1 )", ".tran 1p 0.5n")
    trace = digitize(wave, ["a"], 1.0)
    vcd = export_vcd(trace)
    assert "$timescale 1ps $end" in vcd
    assert "$var wire 1 ! a $end" in vcd
    assert "#0\n0!" in vcd
    assert "x!" in vcd and "1!" in vcd


def test_export_vcd_deterministic():
    wave = run("Vs a 0 PWL( 0 0 0.2n 1 )\nR1 a b 1k\nC1 b 0 10f", ".tran 1p 0.5n")
    trace = digitize(wave, ["a", "b"], 1.0)
    assert export_vcd(trace) == export_vcd(trace)
