#!/usr/bin/env python3
"""Benchmark the compiled engine core against the pure-Python fallback.

Measures the fused random advance (sample + apply + events), state
encoding, and a full planner decision, and verifies on the way that both
cores produce identical results on the measured workload.

Usage: python benchmarks/bench_cores.py [--games N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gemelites.agent import BmrhConfig, BmrhPlanner
from gemelites.engine import GameSpec
from gemelites.engine import layout as L
from gemelites.engine.backend import available_cores, get_core
from gemelites.engine.game import new_game
from gemelites.heuristics import PbEvaluator
from gemelites.rng import Rng, derive_seed


def bench_advance(core, spec, games):
    rng = Rng(1234)
    ab = spec.layout.new_action_buffer()
    eb = L.event_buffer(spec.max_events_per_action())
    steps = 0
    checksum = 0
    t0 = time.perf_counter()
    for seed in range(games):
        state = new_game(spec, seed)
        while not state.is_over:
            core.advance_random(state.buf, spec.ctx, spec.off, rng.state, ab, eb, 0)
            steps += 1
        checksum ^= int(state.buf.sum())
    return (time.perf_counter() - t0) / steps, steps, checksum


def bench_encode(core, spec, reps=2000):
    state = new_game(spec, 7)
    out = np.zeros(spec.encoding_length)
    t0 = time.perf_counter()
    for _ in range(reps):
        core.encode_state(state.buf, spec.ctx, spec.off, 0, out)
    return (time.perf_counter() - t0) / reps


def bench_plan(spec, decisions=30):
    # Planner timing only makes sense on the active backend; run it on
    # whichever core the package selected.
    cfg = BmrhConfig(l=5, n=100, usb=True, mo=True, ms=2, om=0)
    planner = BmrhPlanner(spec, cfg, PbEvaluator(spec), budget=1000)
    state = new_game(spec, 3)
    rng = Rng(derive_seed(3, 1))
    t0 = time.perf_counter()
    for _ in range(decisions):
        planner.choose(state.buf, rng)
    return (time.perf_counter() - t0) / decisions


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", type=int, default=50)
    args = parser.parse_args()

    spec = GameSpec.preset("SP2P")
    cores = available_cores()
    print(f"available cores: {', '.join(cores)}")
    rows = {}
    for name in cores:
        core = get_core(name)
        dt, steps, checksum = bench_advance(core, spec, args.games)
        enc = bench_encode(core, spec)
        rows[name] = (dt, enc, checksum)
        print(
            f"{name:>9}: advance {dt * 1e6:8.2f} us/step ({steps} steps)   "
            f"encode {enc * 1e6:7.2f} us"
        )
    if len(rows) == 2:
        if rows["pure"][2] != rows["compiled"][2]:
            print("MISMATCH: cores disagree on final states!")
            return 1
        speedup = rows["pure"][0] / rows["compiled"][0]
        print(f"checksums match; compiled speedup: {speedup:.1f}x on random advance")
    print(f"planner decision (active backend): {bench_plan(spec) * 1e3:.2f} ms")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
