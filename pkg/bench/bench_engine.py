#!/usr/bin/env python3
"""Benchmark the transient engine: numba kernels vs the pure-numpy path.

Runs the same fixture in this process (numba, unless MRLSIM_NO_NUMBA is
already set) and in a subprocess with MRLSIM_NO_NUMBA=1, reports
steps/second for both, the speedup, and the maximum absolute difference
between the two waveforms (expected: ~1e-14 V — both paths run the same
algorithm; residual differences come from the linear-algebra backend).

Usage: python bench/bench_engine.py [--block xax] [--slots 8] [--tstep 1e-12]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def build_fixture(block_kind, slots, tstep):
    from mrlsim import gates
    from mrlsim.verify import VerifyConfig, _build_harness

    cfg = VerifyConfig(tstep=tstep)
    block = gates.build_block(block_kind)
    rng = np.random.default_rng(0)
    levels = {
        port: [int(b) for b in rng.integers(0, 2, size=slots)]
        for port in block.inputs
    }
    edges = [True] * slots if block.clocked else None
    period = cfg.clock_period if block.clocked else cfg.settle
    return _build_harness(block, levels, edges, period, cfg)


def run_once(text):
    from mrlsim.engine import run_transient
    from mrlsim.netlist import expand, parse

    flat = expand(parse(text))
    n_steps = int(round(flat.analyses[0].tstop / flat.analyses[0].tstep))
    t0 = time.perf_counter()
    wave = run_transient(flat)
    elapsed = time.perf_counter() - t0
    return wave, n_steps, elapsed


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--block", default="xax", help="block fixture to simulate")
    ap.add_argument("--slots", type=int, default=8, help="stimulus slots")
    ap.add_argument("--tstep", type=float, default=1e-12)
    ap.add_argument("--subprocess-json", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    text = build_fixture(args.block, args.slots, args.tstep)

    if args.subprocess_json:
        wave, n_steps, elapsed = run_once(text)  # warm run only
        wave, n_steps, elapsed = run_once(text)
        print(json.dumps({
            "elapsed": elapsed,
            "n_steps": n_steps,
            "volts_sum": float(np.abs(wave.volts).sum()),
            "volts": wave.volts.tolist(),
        }))
        return

    from mrlsim import _kernels

    label = "numba" if _kernels.USE_NUMBA else "numpy (MRLSIM_NO_NUMBA set)"
    run_once(text)  # warm-up: jit compile outside the timed run
    wave, n_steps, elapsed = run_once(text)
    print(f"fixture: {args.block}, {args.slots} slots, "
          f"{n_steps} steps of {args.tstep:g} s")
    print(f"{label:>28}: {elapsed:8.3f} s  ({n_steps / elapsed:12.0f} steps/s)")

    env = dict(os.environ, MRLSIM_NO_NUMBA="1")
    cmd = [sys.executable, os.path.abspath(__file__),
           "--block", args.block, "--slots", str(args.slots),
           "--tstep", repr(args.tstep), "--subprocess-json"]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    payload = json.loads(out.stdout)
    el2 = payload["elapsed"]
    print(f"{'pure numpy (subprocess)':>28}: {el2:8.3f} s  "
          f"({n_steps / el2:12.0f} steps/s)")
    print(f"{'speedup':>28}: {el2 / elapsed:8.1f}x")
    diff = float(np.max(np.abs(wave.volts - np.asarray(payload["volts"]))))
    print(f"{'max |V| difference':>28}: {diff:.3e} V")


if __name__ == "__main__":
    main()
