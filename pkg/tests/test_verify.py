"""Equivalence-checker tests (fast paths; the full matrix runs in
test_acceptance.py)."""

import itertools

import pytest

from mrlsim import verify
from mrlsim.verify import (
    VerifyConfig,
    _clock_points,
    _precharge_points,
    _pwl_points,
    _xax_coverage_sequence,
    equivalence_check,
)


def test_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(vdd=0.0)
    with pytest.raises(ValueError):
        VerifyConfig(tstep=1e-9, settle=0.4e-9)


def test_pwl_points_ramp_only_on_change():
    pts = _pwl_points([0, 0, 1, 1, 0], 1e-9, 50e-12)
    assert pts[0] == (0.0, 0)
    times = [t for t, _ in pts]
    assert times == sorted(times)
    # transitions at slots 2 and 4 only
    assert len(pts) == 5


def test_clock_points_idle_high_and_monotone():
    pts = _clock_points([True, False, True], 1e-9, 50e-12)
    assert pts[0] == (0.0, 1.0)
    times = [t for t, _ in pts]
    assert all(b > a for a, b in zip(times, times[1:]))
    # slot 0: falls at 0.45 ns, rises at 0.85 ns; slot 1 has no edge
    assert any(t == pytest.approx(0.45e-9) and v == 1.0 for t, v in pts)
    assert any(t == pytest.approx(0.85e-9) and v == 0.0 for t, v in pts)
    assert not any(1.0e-9 <= t < 2.0e-9 for t, _ in pts[1:])


def test_precharge_points_visit_one_each_slot():
    import numpy as np

    levels = [0, 0, 1, 0]
    period = 1e-9
    pts = _precharge_points(levels, period, 50e-12)
    times = [t for t, _ in pts]
    assert all(b > a for a, b in zip(times, times[1:]))
    assert pts[0] == (0.0, 0.0)

    def value_at(t):
        return float(np.interp(t, [p[0] for p in pts], [p[1] for p in pts]))

    # slot 0 is plain; each later slot sits at 1 through its first quarter
    assert value_at(0.1 * period) == 0.0
    for k in (1, 2, 3):
        assert value_at((k + 0.1) * period) == 1.0
        assert value_at((k + 0.2) * period) == 1.0
        # and at the actual level by mid-slot
        assert value_at((k + 0.5) * period) == float(levels[k])


def test_xax_coverage_is_eulerian():
    seq = _xax_coverage_sequence()
    assert len(seq) == 64

    def step(state, inp):
        xr, ar, acc = state
        x, a, s = inp
        return (x, a, ((x ^ xr) & ar) ^ s)

    state = (0, 0, 0)
    seen = set()
    for inp in seq:
        assert (state, inp) not in seen
        seen.add((state, inp))
        state = step(state, inp)
    assert len(seen) == 64  # every (state, input) pair exactly once
    states = {s for s, _ in seen}
    assert states == set(itertools.product((0, 1), repeat=3))


def test_gate_equivalence_fast():
    rep = equivalence_check("xor", "exhaustive")
    assert rep.passed and rep.vectors == 4
    assert rep.first_divergence is None
    assert "PASS" in rep.summary()


def test_random_mode_seed_echoed():
    cfg = VerifyConfig(seed=7)
    rep = equivalence_check("and", "random", cfg)
    assert rep.passed
    assert rep.seeds == [7]
    assert "seeds: 7" in rep.summary()


def test_dlatch_equivalence():
    assert equivalence_check("dlatch", "exhaustive").passed


def test_dff_equivalence():
    rep = equivalence_check("dff", "exhaustive")
    assert rep.passed
    # 8 enumerated cases plus their state-establishing preambles
    assert rep.vectors == 16


def test_mismatch_reported_with_detail():
    # a deliberately wrong oracle expectation produces a divergence record
    rep = verify.EquivalenceReport(block="t", mode="m", passed=False, vectors=0)
    verify._compare(
        rep,
        {"y": [0.95, 0.5]},
        [1e-9, 2e-9],
        {"y": [0, 1]},
        VerifyConfig(),
    )
    assert len(rep.divergences) == 1 and len(rep.x_failures) == 1
    assert rep.first_divergence.time == 1e-9
    assert "expected 0, observed 1" in str(rep.divergences[0])
    assert "FAIL" in rep.summary()


def test_unknown_block_and_mode():
    with pytest.raises(ValueError):
        equivalence_check("alu", "exhaustive")
    with pytest.raises(ValueError):
        equivalence_check("xor", "sometimes")


def test_xax_single_random_sequence():
    cfg = VerifyConfig(sequences=1, cycles=4)
    rep = equivalence_check("xax", "random", cfg)
    assert rep.passed
    assert rep.seeds == [0]
