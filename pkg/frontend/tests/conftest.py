import csv
import math
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

METRICS = ("card_count", "total_coins", "nobles", "card_cost", "reserved_cards")
PAIRS = list(combinations(range(5), 2))


def write_matrix(path: Path, grid) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in grid:
            writer.writerow(["" if isinstance(v, float) and math.isnan(v) else v for v in row])


def write_series(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def make_analysis_dir(directory: Path, empty: bool = False, history: bool = True) -> Path:
    """Fabricate a single-experiment analysis directory in the documented
    CSV interface format."""
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(7)
    for dx, dy in PAIRS:
        grid = np.full((62, 62), math.nan)
        if not empty:
            for _ in range(30):
                grid[rng.integers(0, 62), rng.integers(0, 62)] = rng.random()
        write_matrix(directory / f"heatmap_{METRICS[dx]}_vs_{METRICS[dy]}.csv", grid)
    if empty:
        write_series(directory / "coverage.csv", ["iteration", "filled_cells"], [])
        write_series(directory / "convergence.csv", ["iteration", "total_fitness"], [])
        write_series(directory / "histogram.csv", ["bin_lo", "bin_hi", "count"],
                     [[i / 10, (i + 1) / 10, 0] for i in range(10)])
    else:
        write_series(directory / "coverage.csv", ["iteration", "filled_cells"],
                     [[i, min(i + 1, 25)] for i in range(40)])
        write_series(directory / "convergence.csv", ["iteration", "total_fitness"],
                     [[i, 0.3 * min(i + 1, 25)] for i in range(40)])
        write_series(directory / "histogram.csv", ["bin_lo", "bin_hi", "count"],
                     [[i / 10, (i + 1) / 10, int(rng.integers(0, 6))] for i in range(10)])
    if history:
        header = ["time"] + [f"Behave_D{i}" for i in range(5)] + [
            "behaviours", "agentConfig", "weights",
        ] + [f"Behaviour{i}" for i in range(5)] + [f"Support{i}" for i in range(3)]
        rows = []
        for t in range(30):
            cells = [int(rng.integers(0, 62)) for _ in range(5)]
            rows.append([t] + cells + ["[]", "[]", "[]"] + ["[]"] * 8)
        write_series(directory / "spaceHistory_binned.csv", header, rows)
    return directory


def make_comparison_dir(directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(8)
    for dx, dy in PAIRS:
        cov = rng.integers(0, 4, size=(62, 62))
        write_matrix(directory / f"compare_coverage_{METRICS[dx]}_vs_{METRICS[dy]}.csv", cov)
        delta = np.full((62, 62), math.nan)
        for _ in range(20):
            delta[rng.integers(0, 62), rng.integers(0, 62)] = rng.random() * 2 - 1
        write_matrix(directory / f"compare_delta_{METRICS[dx]}_vs_{METRICS[dy]}.csv", delta)
    return directory


@pytest.fixture()
def analysis_dir(tmp_path):
    return make_analysis_dir(tmp_path / "EF_ID")


@pytest.fixture()
def comparison_dir(tmp_path):
    return make_comparison_dir(tmp_path / "PB vs EF_ID")
