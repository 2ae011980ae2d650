"""Acceptance gate: every criterion at its stated scale and tolerance.

Run with `pytest tests/test_acceptance.py -v -s`; each criterion prints a
PASS/FAIL line. The desk-scale search criteria dominate the runtime
(roughly 1.5-2 h on two cores; the protocol itself budgets 2 h on eight).
"""

import json
import math
import os
import statistics
import time
from pathlib import Path

import numpy as np
import pytest

from gemelites.agent import RandomPlayer, play_game
from gemelites.engine import GameSpec, encoding_length, new_game
from gemelites.engine import layout as L
from gemelites.engine.backend import core
from gemelites.engine.game import result
from gemelites.experiment import (
    ExperimentConfig,
    persist,
    load,
    run,
    validate_directory,
)
from gemelites.qd import (
    Archive,
    Elite,
    bucket_index,
    build_genome_space,
    confidence_half_width,
    default_behaviour_space,
)
from gemelites.rng import Rng, derive_seed

WORKERS = min(os.cpu_count() or 1, 8)

# Desk-scale protocol: n_boot/n_budget/games/repeats per the coverage
# criterion; the per-decision planner budget is a free knob of the
# protocol, pinned here (see the run metadata of every desk experiment).
DESK = dict(n_boot=200, n_budget=1000, games_per_eval=20, budget=200)
DESK_REPEAT_SEEDS = (1, 2, 3)
DESK_SPACES = ("PB", "EF_ID", "EF_HC", "SF")

W2_PROBE = dict(n_boot=150, n_budget=400, games_per_eval=10, budget=200, master_seed=5)


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {status}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


# ----------------------------------------------------------------- 1


def test_engine_conformance_10k_games():
    """10^4 random SP2P games with invariant assertions, < 2 minutes."""
    spec = GameSpec.preset("SP2P")
    ab = spec.layout.new_action_buffer()
    eb = L.event_buffer(spec.max_events_per_action())
    points_off = [
        int(spec.off[L.O_PL]) + p * int(spec.off[L.O_PS]) + int(spec.off[L.O_R_POINTS])
        for p in range(2)
    ]
    violations = 0
    t0 = time.perf_counter()
    for seed in range(10_000):
        state = new_game(spec, seed)
        rng = Rng(derive_seed(seed, 0xC0F))
        buf = state.buf
        prev_points = [0, 0]
        while not buf[L.S_OVER]:
            who = int(buf[L.S_CUR])
            n = core.advance_random(buf, spec.ctx, spec.off, rng.state, ab, eb, 0)
            if n < 0 or core.check_invariants(buf, spec.ctx, spec.off):
                violations += 1
            gained = int(buf[points_off[who]]) - prev_points[who]
            if gained > 0:
                scored = 0
                for i in range(n):
                    etype = eb[i * L.EVENT_W]
                    if etype == L.EV_POINTS_FROM_CARD and eb[i * L.EVENT_W + 1] == who:
                        scored += int(eb[i * L.EVENT_W + 3])
                    elif etype == L.EV_POINTS_FROM_NOBLE and eb[i * L.EVENT_W + 3] == who:
                        scored += int(eb[i * L.EVENT_W + 4])
                if scored != gained:
                    violations += 1
            prev_points[who] = int(buf[points_off[who]])
    elapsed = time.perf_counter() - t0
    report(
        "engine conformance",
        violations == 0 and elapsed < 120.0,
        f"10^4 games, {violations} violations, {elapsed:.1f}s",
    )


# ----------------------------------------------------------------- 2


def test_symmetry_oracle_10k_games():
    """Random vs random with seat alternation: mean outcome 0.5 +/- 0.03."""
    spec = GameSpec.preset("SP2P")
    ab = spec.layout.new_action_buffer()
    eb = L.event_buffer(spec.max_events_per_action())
    total = 0.0
    games = 10_000
    for g in range(games):
        state = new_game(spec, derive_seed(0x57A7, g))
        rng = Rng(derive_seed(0x57A8, g))
        while not state.buf[L.S_OVER]:
            core.advance_random(state.buf, spec.ctx, spec.off, rng.state, ab, eb, 0)
        total += result(state)[g % 2]
    mean = total / games
    report("symmetry oracle", abs(mean - 0.5) <= 0.03, f"mean outcome {mean:.4f}")


# ----------------------------------------------------------------- 3


def test_confidence_margin_reference_case():
    value = confidence_half_width(0.5, 100)
    report(
        "confidence margin",
        abs(value - 0.098) <= 1e-3,
        f"1.96*sqrt(p(1-p)/100) at p=0.5 -> {value:.5f}",
    )


# ----------------------------------------------------------------- 4


def test_bucketization_against_linear_scan_oracle():
    """10^5 random values per metric agree with an edge-scan oracle."""
    rng = Rng(0xB0C3)
    mismatches = 0
    checked = 0
    for metric in default_behaviour_space().metrics:
        edges = metric.edges()
        span = metric.hi - metric.lo
        for _ in range(100_000):
            value = metric.lo - span + rng.uniform() * 3 * span
            fast = bucket_index(value, metric.lo, metric.hi, metric.buckets)
            if value < metric.lo:
                slow = 0
            else:
                slow = metric.buckets - 1
                for i in range(metric.buckets):
                    if edges[i] <= value < edges[i + 1]:
                        slow = i
                        break
            checked += 1
            if fast != slow:
                mismatches += 1
    report("bucketization oracle", mismatches == 0, f"{checked} values, {mismatches} mismatches")


# ----------------------------------------------------------------- 5


def test_archive_laws_100k_inserts():
    space = default_behaviour_space()
    archive = Archive(space)
    rng = Rng(0xA5C1)
    bounds = [(m.lo, m.hi) for m in space.metrics]
    filled_prev = 0
    cell_best: dict = {}
    violations = 0
    for i in range(100_000):
        behaviour = tuple(
            lo + rng.uniform() * (hi - lo) * 1.2 for lo, hi in bounds
        )
        fitness = rng.below(101) / 100
        cell = space.cell(behaviour)
        best = cell_best.get(cell)
        archive.insert(Elite((0,) * 10, fitness, behaviour, (0.0, 0.0, 0.0), i))
        stored = archive.cells[cell].fitness
        expected = fitness if (best is None or fitness > best) else best
        if stored != expected:
            violations += 1
        cell_best[cell] = stored
        if archive.filled < filled_prev:
            violations += 1
        filled_prev = archive.filled
    # one elite per cell + coordinates re-check
    for cell, elite in archive.cells.items():
        if space.cell(elite.behaviour) != cell:
            violations += 1
    from gemelites.analysis import convergence_curve, coverage_curve

    cov = [c for _, c in coverage_curve(archive.history)]
    conv = [v for _, v in convergence_curve(archive.history)]
    if any(b < a for a, b in zip(cov, cov[1:])):
        violations += 1
    if any(b < a - 1e-12 for a, b in zip(conv, conv[1:])):
        violations += 1
    report(
        "archive laws",
        violations == 0,
        f"10^5 inserts, {archive.filled} cells, {violations} violations",
    )


# ----------------------------------------------------------------- 6


def _slot_walk(params):
    ntt = params.token_types
    count = 0
    for _ in range(params.decks):
        count += 1
        count += params.face_up * (2 * ntt + 1)
    count += params.table_nobles * (ntt + 1)
    count += ntt + 1
    for _ in range(params.players):
        count += 1 + (ntt + 1) + ntt + params.max_reserved * (2 * ntt + 1)
    return count


def test_space_size_conformance():
    spec = GameSpec.preset("SP2P")
    enc = spec.encoding_length
    dims = {k: build_genome_space(k, enc).dims for k in DESK_SPACES}
    oracle_ok = all(
        encoding_length(GameSpec.preset(g).params) == _slot_walk(GameSpec.preset(g).params)
        for g in ("SP2P", "W2", "1C2W")
    )
    ok = (
        dims["PB"] == 10
        and dims["EF_ID"] == 28
        and dims["EF_HC"] == 15
        and dims["SF"] == 10 + enc
        and oracle_ok
    )
    report(
        "space sizes",
        ok,
        f"PB={dims['PB']} EF_ID={dims['EF_ID']} EF_HC={dims['EF_HC']} "
        f"SF={dims['SF']} (10+{enc}), slot oracle {'ok' if oracle_ok else 'MISMATCH'}",
    )


# ----------------------------------------------------------------- 7-8


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    """The 12 desk-protocol searches (4 spaces x 3 repeats)."""
    root = Path(os.environ.get("GEMELITES_DESK_CACHE", "")) if os.environ.get(
        "GEMELITES_DESK_CACHE") else tmp_path_factory.mktemp("desk")
    results = {}
    for space in DESK_SPACES:
        for seed in DESK_REPEAT_SEEDS:
            out = root / f"{space}-{seed}"
            config = ExperimentConfig(
                game="SP2P", space=space, opponent="RND", workers=WORKERS,
                master_seed=seed, output_dir=str(out), batch_size=16, **DESK,
            )
            t0 = time.perf_counter()
            record = run(config)
            print(
                f"  desk run {space} seed {seed}: filled={record.archive.filled} "
                f"best={record.archive.best_fitness():.2f} "
                f"wall={time.perf_counter() - t0:.0f}s",
                flush=True,
            )
            results[(space, seed)] = record
    return root, results


def test_coverage_ordering_at_desk_scale(desk_runs):
    _, results = desk_runs
    medians = {
        space: statistics.median(
            results[(space, seed)].archive.filled for seed in DESK_REPEAT_SEEDS
        )
        for space in DESK_SPACES
    }
    detail = " ".join(f"{k}={medians[k]:.0f}" for k in DESK_SPACES)
    # EF_ID vs EF_HC ordering is reported, not gated.
    print(f"  median filled cells: {detail}  (EF_ID vs EF_HC gap: "
          f"{medians['EF_ID'] - medians['EF_HC']:+.0f})")
    ok = (
        medians["EF_ID"] > medians["PB"]
        and medians["EF_HC"] > medians["PB"]
        and medians["PB"] >= 0.8 * medians["SF"]
    )
    report("coverage ordering", ok, detail)


def test_persistence_round_trip_on_desk_run(desk_runs, tmp_path):
    root, results = desk_runs
    source = root / "PB-1"
    problems = validate_directory(source)
    record = load(source)
    persist(record, tmp_path / "again")
    original = {p.name: p.read_bytes() for p in source.iterdir()}
    rewritten = {p.name: p.read_bytes() for p in (tmp_path / "again").iterdir()}
    ok = not problems and original == rewritten
    report(
        "persistence round trip",
        ok,
        f"{len(original)} documents, {len(problems)} schema problems",
    )


# ----------------------------------------------------------------- 9


def test_degenerate_token_swapping_in_w2(tmp_path):
    config = ExperimentConfig(
        game="W2", space="EF_ID", opponent="RND", workers=WORKERS,
        output_dir=str(tmp_path / "w2"), batch_size=16, **W2_PROBE,
    )
    record = run(config)
    swappers = [
        elite
        for elite in record.archive.elites()
        if elite.support[2] > 2.0 * elite.behaviour[0]  # token swaps vs cards bought
        and elite.support[2] > 0
    ]
    report(
        "degenerate behaviour probe",
        len(swappers) >= 1,
        f"{len(swappers)} archived elites swap coins more than twice their purchases",
    )
