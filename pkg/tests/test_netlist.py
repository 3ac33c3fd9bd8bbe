"""Parser, serializer, expansion and validation tests."""

import pytest

from mrlsim import gates
from mrlsim.netlist import (
    NetlistError,
    expand,
    parse,
    parse_number,
    serialize,
    validate,
)

SIMPLE = """\
* divider
.model MR memristor r_on=1k r_off=1meg
Vs in 0 DC 1.0
Y1 out in MR x0=1
Y2 out 0 MR x0=0 polarity=-1
R1 out mid 10k
C1 mid 0 2f ic=0.5
.tran 1p 1n
.end
"""


def test_number_suffixes():
    assert parse_number("1k") == 1e3
    assert parse_number("1meg") == 1e6
    assert parse_number("2.5u") == pytest.approx(2.5e-6, rel=1e-12)
    assert parse_number("100f") == 100e-15
    assert parse_number("-3m") == -3e-3
    assert parse_number("1e-9") == 1e-9
    assert parse_number("4N") == 4e-9  # suffixes are case-insensitive


def test_malformed_number_rejected():
    with pytest.raises(NetlistError):
        parse_number("1x")
    with pytest.raises(NetlistError):
        parse_number("meg")


def test_parse_simple():
    c = parse(SIMPLE)
    assert c.title == "* divider"
    kinds = [d.kind for d in c.devices]
    assert kinds == ["V", "Y", "Y", "R", "C"]
    assert c.devices[1].initial_state == 1.0
    assert c.devices[2].params["polarity"] == -1.0
    assert c.devices[4].params["ic"] == 0.5
    assert c.analyses[0].tstep == 1e-12 and c.analyses[0].tstop == 1e-9


def test_continuation_and_comments():
    text = (
        "* t\n"
        "R1 a 0\n"
        "+ 1k ; trailing comment\n"
        "* full-line comment\n"
        "R2 a 0 2k\n"
        ".end\n"
    )
    c = parse(text)
    assert len(c.devices) == 2
    assert c.devices[0].params["value"] == 1e3


def test_parse_errors_carry_line_numbers():
    with pytest.raises(NetlistError) as exc:
        parse("* t\nR1 a 0 oops\n.end\n")
    assert "line 2" in str(exc.value)
    with pytest.raises(NetlistError):
        parse("* t\n+ continuation first\n.end\n")
    with pytest.raises(NetlistError):
        parse("* t\n.bogus\n.end\n")
    with pytest.raises(NetlistError):
        parse("* t\nR1 a 0 1k\nr1 b 0 1k\n.end\n")  # duplicate, case-insensitive
    with pytest.raises(NetlistError):
        parse("* t\n.subckt foo a\nR1 a 0 1k\n.end\n")  # unterminated
    with pytest.raises(NetlistError):
        parse("* t\n.ends\n.end\n")


def test_pwl_times_must_increase():
    with pytest.raises(NetlistError):
        parse("* t\nV1 a 0 PWL( 0 0 1n 1 0.5n 0 )\n.end\n")


def test_roundtrip_fixpoint_simple():
    c1 = parse(SIMPLE)
    s1 = serialize(c1)
    c2 = parse(s1)
    s2 = serialize(c2)
    assert s1 == s2


@pytest.mark.parametrize("kind", gates.BLOCK_KINDS)
def test_roundtrip_fixpoint_generated_corpus(kind):
    block = gates.build_block(kind)
    text = f"* {kind}\n{gates.DEFAULT_MODEL_DECK}{block.text}.end\n"
    s1 = serialize(parse(text))
    s2 = serialize(parse(s1))
    assert s1 == s2


def test_expand_flattens_hierarchy():
    text = (
        "* h\n"
        ".model MR memristor r_on=1k r_off=1meg\n"
        ".subckt pair a b\n"
        "Y1 a m MR\n"
        "Y2 m b MR\n"
        ".ends\n"
        "X1 in out pair\n"
        "X2 out 0 pair\n"
        "Vs in 0 DC 1\n"
        ".end\n"
    )
    flat = expand(parse(text))
    names = [d.name for d in flat.devices]
    # top-level devices first, then instances in declaration order
    assert names == ["Vs", "X1.Y1", "X1.Y2", "X2.Y1", "X2.Y2"]
    assert "X1.m" in flat.nets and "X2.m" in flat.nets
    assert flat.nets[0] == "0"
    # model defaults are folded in
    assert flat.devices[1].params["r_on"] == 1e3
    assert flat.devices[1].params["v_char"] == 0.25


def test_expand_ground_aliases_merge():
    text = "* g\nR1 a gnd 1k\nR2 a 0 1k\nVs a 0 DC 1\n.end\n"
    flat = expand(parse(text))
    assert len(flat.nets) == 2  # ground plus 'a'


def test_expand_errors():
    with pytest.raises(NetlistError):
        expand(parse("* t\nX1 a b missing\n.end\n"))
    with pytest.raises(NetlistError):
        expand(parse("* t\n.subckt s a b\nR1 a b 1\n.ends\nX1 a s\n.end\n"))
    with pytest.raises(NetlistError):
        expand(parse("* t\nY1 a 0 NOPE\n.end\n"))
    recursive = (
        "* t\n.subckt s a\nX1 a s\n.ends\nX1 top s\n.end\n"
    )
    with pytest.raises(NetlistError):
        expand(parse(recursive))


def test_expand_model_type_checked():
    text = "* t\n.model N nmos\nY1 a 0 N\n.end\n"
    with pytest.raises(NetlistError):
        expand(parse(text))


def test_validate_clean_fixture():
    flat = expand(parse(SIMPLE))
    errors = [d for d in validate(flat) if d.severity == "error"]
    assert errors == []


def test_validate_flags_floating_and_stranded():
    text = "* t\nVs a 0 DC 1\nR1 a b 1k\nC1 c d 1p\n.end\n"
    flat = expand(parse(text))
    messages = [str(d) for d in validate(flat)]
    assert any("floating net" in m and "b" in m for m in messages)
    assert any("no DC path to ground" in m for m in messages)


@pytest.mark.parametrize("kind", gates.BLOCK_KINDS)
def test_generated_corpus_validates_clean(kind):
    block = gates.build_block(kind)
    ports = " ".join(block.ports)
    drive = "\n".join(
        f"V{p} {p} 0 DC 0" for p in block.ports if p not in ("vdd",)
    )
    text = (
        f"* {kind} harness\n{gates.DEFAULT_MODEL_DECK}{block.text}"
        f"Vvdd vdd 0 DC 1\n{drive}\nXdut {ports} {block.name}\n.end\n"
    )
    flat = expand(parse(text))
    errors = [d for d in validate(flat) if d.severity == "error"]
    assert errors == []
