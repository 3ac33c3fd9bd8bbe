"""Behavioral oracle tests."""

import itertools

import pytest

from mrlsim.golden import (
    GATE_ARITY,
    XaxState,
    eval_gate,
    step_dff,
    step_dlatch,
    step_xax,
)

TRUTH = {
    "and": [0, 0, 0, 1],
    "or": [0, 1, 1, 1],
    "nand": [1, 1, 1, 0],
    "nor": [1, 0, 0, 0],
    "xor": [0, 1, 1, 0],
}


@pytest.mark.parametrize("kind", sorted(TRUTH))
def test_two_input_truth_tables(kind):
    outs = [eval_gate(kind, (a, b)) for a, b in itertools.product((0, 1), repeat=2)]
    assert outs == TRUTH[kind]


def test_not_gate():
    assert eval_gate("not", (0,)) == 1
    assert eval_gate("not", (1,)) == 0
    assert GATE_ARITY["not"] == 1


def test_eval_gate_errors():
    with pytest.raises(ValueError):
        eval_gate("xnor", (0, 0))
    with pytest.raises(ValueError):
        eval_gate("and", (0,))
    with pytest.raises(ValueError):
        eval_gate("and", (0, 2))


def test_step_dff():
    assert step_dff(1, "rising", 0) == 1
    assert step_dff(0, "rising", 1) == 0
    assert step_dff(1, "none", 0) == 0
    assert step_dff(0, "none", 1) == 1
    with pytest.raises(ValueError):
        step_dff(0, "falling", 0)


def test_step_dlatch():
    assert step_dlatch(1, 1, 0) == 1  # transparent
    assert step_dlatch(1, 0, 0) == 0  # opaque holds
    assert step_dlatch(0, 0, 1) == 1


def test_xax_state_validation():
    with pytest.raises(ValueError):
        XaxState(2, 0, 0)


def test_step_xax_registers_delay_one_cycle():
    st = XaxState()
    x_out, acc_out, st = step_xax(1, 1, 0, st)
    # outputs are the pre-edge register values
    assert (x_out, acc_out) == (0, 0)
    assert st == XaxState(xr=1, ar=1, acc=0)  # (1^0)&0 ^ 0


def test_step_xax_accumulator_formula():
    for xr, ar, acc, x, a, s in itertools.product((0, 1), repeat=6):
        st = XaxState(xr, ar, acc)
        x_out, acc_out, nxt = step_xax(x, a, s, st)
        assert x_out == xr and acc_out == acc
        assert nxt.xr == x and nxt.ar == a
        assert nxt.acc == ((x ^ xr) & ar) ^ s


def test_step_xax_sequence():
    # hand-checked accumulate-then-pass sequence
    st = XaxState()
    seq = [(1, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0)]
    accs = []
    for x, a, s in seq:
        _, _, st = step_xax(x, a, s, st)
        accs.append(st.acc)
    assert accs == [0, 1, 1, 0]
