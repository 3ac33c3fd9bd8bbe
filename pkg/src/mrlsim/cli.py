"""Command-line surface: sim, gen, verify, report.

Exit codes: sim returns 2 on parse/validate errors and 3 on solver
errors; verify returns 1 on a mismatch. Every option can also be set via
an MRLSIM_-prefixed environment variable (e.g. MRLSIM_VERIFY_SEED).
"""

import json
import pathlib
import sys

import click

from mrlsim import gates, measure, report as report_mod, verify
from mrlsim.engine import SimOptions, SolverError, run_transient
from mrlsim.netlist import NetlistError, expand, parse, validate

EXIT_PARSE = 2
EXIT_SOLVER = 3


@click.group()
def main():
    """MRL circuit simulator and verification harness."""


def _verify_config(vdd, clock, tstep, seed, **extra):
    return verify.VerifyConfig(
        vdd=vdd, clock_period=clock, tstep=tstep,
        settle=0.4 * clock, seed=seed, **extra,
    )


@main.command()
@click.argument("netlist_path", type=click.Path(path_type=pathlib.Path))
@click.option("--tstep", type=float, default=None, help="override .tran step (s)")
@click.option("--tstop", type=float, default=None, help="override .tran stop (s)")
@click.option("--vdd", type=float, default=1.0, show_default=True,
              help="logic threshold reference for VCD digitization")
@click.option("--out", "out_dir", type=click.Path(path_type=pathlib.Path),
              default=".", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "vcd", "both"]),
              default="csv", show_default=True)
def sim(netlist_path, tstep, tstop, vdd, out_dir, fmt):
    """Run a transient simulation of a netlist file."""
    try:
        text = netlist_path.read_text()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    try:
        circuit = parse(text)
        flat = expand(circuit)
    except NetlistError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    for diag in validate(flat):
        click.echo(str(diag), err=True)
    options = None
    if tstep is not None or tstop is not None:
        trans = [a for a in flat.analyses if a.kind == "tran"]
        base_step = tstep if tstep is not None else (trans[0].tstep if trans else None)
        base_stop = tstop if tstop is not None else (trans[0].tstop if trans else None)
        if base_step is None or base_stop is None:
            click.echo("error: no .tran card; give both --tstep and --tstop", err=True)
            sys.exit(EXIT_PARSE)
        options = SimOptions(tstep=base_step, tstop=base_stop)
    try:
        wave = run_transient(flat, options)
    except SolverError as exc:
        click.echo(f"solver error: {exc}", err=True)
        sys.exit(EXIT_SOLVER)
    for t, msg in wave.warnings:
        click.echo(f"warning (t={t:.3e}s): {msg}", err=True)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = netlist_path.stem
    if fmt in ("csv", "both"):
        (out_dir / f"{stem}.csv").write_text(measure.export_csv(wave))
        click.echo(f"wrote {out_dir / (stem + '.csv')}")
    if fmt in ("vcd", "both"):
        trace = measure.digitize(wave, wave.nets[1:], vdd)
        (out_dir / f"{stem}.vcd").write_text(measure.export_vcd(trace))
        click.echo(f"wrote {out_dir / (stem + '.vcd')}")
    click.echo("final node voltages:")
    for i, net in enumerate(wave.nets):
        if i == 0:
            continue
        click.echo(f"  {net}: {wave.volts[-1, i]:.6g} V")


@main.command()
@click.argument("block", type=click.Choice(gates.BLOCK_KINDS))
@click.option("--out", "out_path", type=click.Path(path_type=pathlib.Path),
              default=None, help="also write the netlist to a file")
def gen(block, out_path):
    """Print the subcircuit netlist and device census of an MRL block."""
    blk = gates.build_block(block)
    text = gates.DEFAULT_MODEL_DECK + blk.text
    click.echo(text.rstrip())
    click.echo(f"* block: {blk.name} ports: {' '.join(blk.ports)}")
    click.echo(f"memristors: {blk.census.memristors}")
    click.echo(f"transistors: {blk.census.transistors}")
    click.echo(f"inverter cells: {blk.census.inverter_cells}")
    if out_path is not None:
        out_path.write_text(text)
        click.echo(f"wrote {out_path}")


@main.command(name="verify")
@click.argument("block", type=click.Choice(gates.BLOCK_KINDS))
@click.option("--exhaustive/--random", "exhaustive", default=True,
              help="stimulus mode", show_default=True)
@click.option("--vdd", type=float, default=1.0, show_default=True)
@click.option("--clock", type=float, default=1e-9, show_default=True,
              help="slot/clock period (s)")
@click.option("--tstep", type=float, default=1e-12, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sequences", type=int, default=100, show_default=True,
              help="random sequences (xax random mode)")
@click.option("--cycles", type=int, default=8, show_default=True,
              help="cycles per random sequence (xax random mode)")
@click.option("--json", "as_json", is_flag=True, default=False)
def verify_cmd(block, exhaustive, vdd, clock, tstep, seed, sequences, cycles,
               as_json):
    """Check a generated block against the behavioral oracle."""
    cfg = _verify_config(vdd, clock, tstep, seed,
                         sequences=sequences, cycles=cycles)
    mode = "exhaustive" if exhaustive else "random"
    rep = verify.equivalence_check(block, mode, cfg)
    if as_json:
        first = rep.first_divergence
        click.echo(json.dumps({
            "block": rep.block,
            "mode": rep.mode,
            "passed": rep.passed,
            "vectors": rep.vectors,
            "seeds": rep.seeds,
            "mismatches": len(rep.divergences),
            "x_at_sample": len(rep.x_failures),
            "first_divergence": str(first) if first else None,
            "header": {str(k): str(v) for k, v in rep.header.items()},
        }, indent=2))
    else:
        click.echo(rep.summary())
    sys.exit(0 if rep.passed else 1)


@main.command(name="report")
@click.option("--measure/--no-measure", "do_measure", default=False,
              help="also simulate the module for delay/power columns")
@click.option("--vdd", type=float, default=1.0, show_default=True)
@click.option("--clock", type=float, default=1e-9, show_default=True)
@click.option("--tstep", type=float, default=1e-12, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True, default=False)
def report_cmd(do_measure, vdd, clock, tstep, seed, as_json):
    """Device-count and area comparison against published CMOS baselines."""
    cfg = _verify_config(vdd, clock, tstep, seed)
    rep = report_mod.build_report(measure=do_measure, cfg=cfg)
    if as_json:
        click.echo(json.dumps(rep.as_dict(), indent=2))
    else:
        click.echo(rep.as_text().rstrip())


def entry():  # pragma: no cover
    main(auto_envvar_prefix="MRLSIM")


if __name__ == "__main__":  # pragma: no cover
    entry()
